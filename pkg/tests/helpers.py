"""Independent oracles and generators shared across the test modules.

Everything here re-derives expected behavior from first principles (plain
stepping, brute-force grids, closed-form enumeration arithmetic) so the
library paths under test are checked against a second route, not against
themselves.
"""

from __future__ import annotations

import random
from typing import Callable, Optional, Sequence

from godelsim.machine import BLANK, Halted, ID, Machine, canonicalize, step


# --- plain machine stepping --------------------------------------------------


def naive_outcome(machine: Machine, start: ID, budget: int):
    """('halt', steps, final_id) by plain stepping, or ('running', last_id)."""
    current = start
    for done in range(budget + 1):
        nxt = step(machine, current)
        if nxt is None:
            return ("halt", done, current)
        if done == budget:
            break
        current = nxt
    return ("running", current)


def replay_ids(machine: Machine, upto: int) -> list[ID]:
    """Raw configurations at steps 0..upto (shorter if the machine halts)."""
    ids = [ID(machine.start_state, 0, {})]
    for _ in range(upto):
        nxt = step(machine, ids[-1])
        if nxt is None:
            break
        ids.append(nxt)
    return ids


# --- random machines and configurations --------------------------------------


STATES = ("a", "b", "c")
SYMBOLS = (BLANK, "0", "1")


def random_machine(rng: random.Random) -> Machine:
    rules = []
    for state in STATES:
        for symbol in SYMBOLS:
            if rng.random() < 0.7:
                rules.append(
                    (
                        state,
                        symbol,
                        rng.choice(STATES),
                        rng.choice(SYMBOLS),
                        rng.choice(("L", "R")),
                    )
                )
    return Machine.from_rules(rules, "a", extra_states=STATES, extra_symbols=SYMBOLS)


def random_id(rng: random.Random) -> ID:
    tape = {}
    for cell in range(-3, 4):
        if rng.random() < 0.4:
            tape[cell] = rng.choice(("0", "1"))
    return ID(rng.choice(STATES), rng.randint(-3, 3), tape)


def canonical_tuple(desc: ID) -> tuple:
    canon = canonicalize(desc)
    return (canon.state, canon.head, tuple(sorted(canon.tape.items())))


# --- beta oracles -------------------------------------------------------------


def brute_matches(seq: Sequence[int], bound: int) -> list[tuple[int, int]]:
    """Exhaustive double loop over the (b, c) grid, (c, b) lexicographic order."""
    out = []
    for c in range(1, bound + 1):
        for b in range(0, bound + 1):
            if all(b % (1 + (i + 1) * c) == value for i, value in enumerate(seq)):
                out.append((b, c))
    return out


def brute_least_crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Least x satisfying all congruences, found by scanning the full product range."""
    limit = 1
    for m in moduli:
        limit *= m
    for x in range(limit):
        if all(x % m == r for r, m in zip(residues, moduli)):
            return x
    raise AssertionError("no solution in the product range")


# --- mu-search oracle -----------------------------------------------------------


def brute_least_zero(fn: Callable[..., int], args: Sequence[int], limit: int) -> Optional[int]:
    for y in range(limit + 1):
        if fn(*args, y) == 0:
            return y
    return None


# --- predictability oracle ------------------------------------------------------


def final_constant_run(values: Sequence[int]) -> tuple[int, int]:
    """(start index, length) of the maximal constant run ending the sequence."""
    last = values[-1]
    start = len(values) - 1
    while start > 0 and values[start - 1] == last:
        start -= 1
    return start, len(values) - start


def oracle_classify(values: Sequence[int], window: int):
    """Independent verdict: ('undetermined',), ('predictable', v, at), ('random', i, j)."""
    if len(values) < window:
        return ("undetermined",)
    start, length = final_constant_run(values)
    if length >= window:
        return ("predictable", values[-1], start)
    lo = len(values) - window
    for i in range(lo, len(values) - 1):
        if values[i] != values[i + 1]:
            return ("random", i, i + 1)
    raise AssertionError("window neither constant nor containing a difference")


# --- reference dovetail engine ---------------------------------------------------


def rank_to_pair(rank: int, task_count: int) -> tuple[int, int]:
    """(task, trial) at a rank of the diagonal enumeration, by direct arithmetic."""
    if rank < 0:
        raise ValueError
    d = 0
    consumed = 0
    while True:
        width = min(d + 1, task_count)
        if consumed + width > rank:
            task = rank - consumed
            return task, d - task
        consumed += width
        d += 1


def reference_dovetail(tasks, sub_budget: int, global_budget: int):
    """Second implementation of the dovetail contract, built around rank arithmetic.

    Returns (events, outcome_desc) where events are
    (global_step, rank, task_id, trial, result) tuples and outcome_desc is
    ('first-success', task_id, trial, halted_steps), ('all-exhausted',) or
    ('global-budget-exceeded',).
    """
    from godelsim.machine import encode_id

    events = []
    state: dict[int, dict] = {}
    exhausted_from: dict[int, int] = {}
    global_step = 0
    admitted = 0
    while True:
        spawned_live = any(slot is not None and slot.get("live") for slot in state.values())
        if len(exhausted_from) == len(tasks) and not spawned_live:
            return events, ("all-exhausted",)
        admitted += 1
        for rank in range(admitted):
            task_idx, trial = rank_to_pair(rank, len(tasks))
            if rank not in state:
                if task_idx in exhausted_from and trial >= exhausted_from[task_idx]:
                    state[rank] = None
                    continue
                sub = tasks[task_idx].generator(trial)
                if sub is None:
                    exhausted_from[task_idx] = min(
                        trial, exhausted_from.get(task_idx, trial)
                    )
                    state[rank] = None
                    continue
                state[rank] = {
                    "machine": sub.machine,
                    "current": sub.input,
                    "steps": 0,
                    "seen": {encode_id(canonicalize(sub.input)): 0},
                    "live": True,
                }
            slot = state[rank]
            if slot is None or not slot["live"]:
                continue
            if global_step == global_budget:
                return events, ("global-budget-exceeded",)
            global_step += 1
            nxt = step(slot["machine"], slot["current"])
            if nxt is None:
                halted = Halted(slot["steps"], slot["current"])
                slot["live"] = False
                if tasks[task_idx].accept(halted):
                    events.append((global_step, rank, tasks[task_idx].task_id, trial, "halted-accepted"))
                    return events, ("first-success", tasks[task_idx].task_id, trial, halted.steps)
                events.append((global_step, rank, tasks[task_idx].task_id, trial, "halted-rejected"))
                continue
            if slot["steps"] == sub_budget:
                slot["live"] = False
                events.append((global_step, rank, tasks[task_idx].task_id, trial, "sub-budget-exhausted"))
                continue
            slot["steps"] += 1
            key = encode_id(canonicalize(nxt))
            if key in slot["seen"]:
                slot["live"] = False
                events.append((global_step, rank, tasks[task_idx].task_id, trial, "loop-detected"))
                continue
            slot["seen"][key] = slot["steps"]
            slot["current"] = nxt
            events.append((global_step, rank, tasks[task_idx].task_id, trial, "advanced"))
