"""Ground-truth spread event logs.

A log is an ordered list of invitation rows (inviter, invitee, invited flag,
accepted flag) plus the cascade forest of realized activations. The forest is
always derived from the rows by causal replay: walking rows in order, an
accepted invitation (u, v) becomes a trajectory edge when v has not acted in
the event before (never an inviter in an earlier row, never activated
earlier). This keeps file round-trips exact, gives each activated node one
parent, and cannot create cycles.

Log file format: `inviter<TAB>invitee<TAB>invited(0|1)<TAB>accepted(0|1)`,
one row per line, no header.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedRow

Row = tuple[int, int, int, int]


def replay_trajectories(rows: list[Row]) -> list[tuple[int, int]]:
    """Derive the activation forest from an ordered row list."""
    active: set[int] = set()
    edges: list[tuple[int, int]] = []
    for inviter, invitee, invited, accepted in rows:
        active.add(inviter)
        if invited and accepted and invitee not in active:
            edges.append((inviter, invitee))
            active.add(invitee)
    return edges


@dataclass(frozen=True)
class EventLog:
    rows: tuple
    trajectories: tuple

    @classmethod
    def from_rows(cls, rows) -> "EventLog":
        rows = tuple((int(a), int(b), int(c), int(d)) for a, b, c, d in rows)
        for u, v, invited, accepted in rows:
            if accepted and not invited:
                raise MalformedRow(f"row ({u}, {v}) accepted without invitation")
            if invited not in (0, 1) or accepted not in (0, 1):
                raise MalformedRow(f"row ({u}, {v}) flags must be 0 or 1")
        return cls(rows, tuple(replay_trajectories(list(rows))))

    def successful_edges(self) -> set[tuple[int, int]]:
        """(inviter, invitee) pairs with at least one invited-and-accepted row."""
        return {(u, v) for u, v, inv, acc in self.rows if inv and acc}

    def node_universe(self) -> set[int]:
        out: set[int] = set()
        for u, v, _, _ in self.rows:
            out.add(u)
            out.add(v)
        return out

    def descendants(self) -> dict[int, set[int]]:
        """Per node, everything reachable below it in the trajectory forest."""
        children: dict[int, list[int]] = {}
        for u, v in self.trajectories:
            children.setdefault(u, []).append(v)
        desc: dict[int, set[int]] = {}

        def collect(x: int) -> set[int]:
            if x in desc:
                return desc[x]
            acc: set[int] = set()
            for c in children.get(x, ()):
                acc.add(c)
                acc |= collect(c)
            desc[x] = acc
            return acc

        for u, v in self.trajectories:
            collect(u)
            collect(v)
        return desc


def save_event_log(log: EventLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, invited, accepted in log.rows:
            fh.write(f"{u}\t{v}\t{invited}\t{accepted}\n")


def load_event_log(path) -> EventLog:
    rows: list[Row] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise MalformedRow(f"log:{lineno}: expected 4 columns, got {len(parts)}")
            try:
                rows.append((int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])))
            except ValueError:
                raise MalformedRow(f"log:{lineno}: non-integer field") from None
    return EventLog.from_rows(rows)
