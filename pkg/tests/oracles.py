"""Small, deliberately naive reference implementations used as test oracles.

None of these import the code under test beyond plain data access.
"""

from __future__ import annotations

import itertools
import json


def reference_run(table, halt, blank, sigma, x, budget):
    """Naive interpreter over a dict table {(q, sym): (q', sym', move)}.

    Uses a growable list tape.  Returns ("halted", output, steps, actions) or
    ("budget", None, budget, None).
    """
    tape = list(x) if x else [blank]
    offset = 0  # tape[i] holds cell i - offset
    head, q, steps = 0, 0, 0
    actions = []
    while q != halt:
        if steps == budget:
            return ("budget", None, budget, None)
        i = head + offset
        if i < 0:
            tape.insert(0, blank)
            offset += 1
            i = 0
        elif i >= len(tape):
            tape.append(blank)
        read = tape[i]
        q, write, move = table[q, read]
        tape[i] = write
        actions.append((read, write, move))
        head += {"L": -1, "R": 1, "S": 0}[move]
        steps += 1
    cells = [s for s in tape]
    # strip blanks at both ends; the rest must be one block of sigma symbols
    while cells and cells[0] == blank:
        cells.pop(0)
    while cells and cells[-1] == blank:
        cells.pop()
    if all(c in sigma for c in cells):
        out = "".join(cells)
    else:
        out = None
    return ("halted", out, steps, tuple(actions))


def table_of(tm):
    """Plain dict table from a machine's public transition listing."""
    return {(q, s): (n, w, mv) for q, s, n, w, mv in tm.transitions()}


def replay(actions, x, blank="_"):
    """Replay write/move tuples; check each read; return (tape dict, head)."""
    tape = {i: s for i, s in enumerate(x)}
    head = 0
    for read, write, move in actions:
        if tape.get(head, blank) != read:
            raise AssertionError(f"replayed read mismatch at {head}")
        if write == blank:
            tape.pop(head, None)
        else:
            tape[head] = write
        head += {"L": -1, "R": 1, "S": 0}[move]
    return tape, head


def fold_outputs(trans, start, u):
    """seq2seq map by explicit left fold over a (q, a) -> (q', b) dict."""
    def stepper(acc, a):
        q, outs = acc
        if (q, a) not in trans:
            return (None, None)
        r, b = trans[q, a]
        return (r, outs + (b,))

    q, outs = start, ()
    for a in u:
        q, outs = stepper((q, outs), a)
        if q is None:
            return None
    return outs


def strings(alphabet, max_len, min_len=1):
    for n in range(min_len, max_len + 1):
        for t in itertools.product(alphabet, repeat=n):
            yield t


def nerode_class_count(trans, n_states, start, alphabet, depth):
    """Number of distinct reachable-state signatures gamma(q, w) over all
    nonempty w of length <= depth.  For total machines with depth >= n this
    equals the Nerode index."""
    reach = {start}
    frontier = [start]
    while frontier:
        q = frontier.pop()
        for a in alphabet:
            r = trans[q, a][0]
            if r not in reach:
                reach.add(r)
                frontier.append(r)
    words = list(strings(alphabet, depth))
    sigs = set()
    for q in reach:
        sig = []
        for w in words:
            sig.append(fold_outputs(trans, q, w)[-1])
        sigs.add(tuple(sig))
    return len(sigs)


def relational_deterministic(trans, blocks):
    """Direct relational-table check of a quotient's determinism."""
    block_of = {}
    for i, b in enumerate(blocks):
        for q in b:
            block_of[q] = i
    table = {}
    for (q, a), (r, b) in trans.items():
        table.setdefault((block_of[q], a), set()).add((block_of[r], b))
    return all(len(v) <= 1 for v in table.values())


def byte_count(x, y, alpha):
    """Hand-assembled record length, bypassing json.dumps for the outer object."""
    def enc(v):
        return json.dumps(v, ensure_ascii=False, separators=(",", ":"))

    text = '{"x":' + enc(x) + ',"y":' + enc(y) + ',"alpha":' + enc(alpha) + "}"
    return len(text.encode("utf-8"))


def closure_merge(trans, n_states, halting, p, q):
    """Smallest partition containing {p, q} closed under determinization,
    computed by naive fixpoint over blocks.  Returns the block list or None
    when some block forces two outputs on one symbol (or a halting block
    gains a transition)."""
    blocks = [{s} for s in range(n_states)]

    def find(s):
        for b in blocks:
            if s in b:
                return b
        raise KeyError(s)

    def union(a, b):
        ba, bb = find(a), find(b)
        if ba is bb:
            return False
        ba |= bb
        blocks.remove(bb)
        return True

    union(p, q)
    changed = True
    while changed:
        changed = False
        for b in list(blocks):
            seen = {}
            for s in sorted(b):
                for (s2, a), (r, out) in trans.items():
                    if s2 != s:
                        continue
                    if a in seen:
                        r0, out0 = seen[a]
                        if out0 != out:
                            return None
                        if union(r0, r):
                            changed = True
                    else:
                        seen[a] = (r, out)
            if changed:
                break
    for b in blocks:
        if b & set(halting) and any(s in b for (s, _a) in trans):
            return None
    return [frozenset(b) for b in blocks]
