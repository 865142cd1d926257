"""Round-synchronous message accounting for simulated LDP protocols.

The mechanisms compute each round as vector operations over all nodes; this
module records what the equivalent per-party message exchange would cost and,
optionally, what was published.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

SCALAR_BITS = 64  # one float64 value
MARK_BITS = 8

CHANNELS = ("node_to_node", "node_to_analyzer", "analyzer_to_node")


@dataclass
class CommLedger:
    """Bit and message counters per channel."""

    bits: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CHANNELS, 0))
    messages: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CHANNELS, 0))

    def record(self, channel: str, messages: int, bits_each: int) -> None:
        if channel not in self.bits:
            raise ValueError(f"unknown channel {channel!r}")
        messages = int(messages)
        if messages < 0:
            raise ValueError("message count must be non-negative")
        self.bits[channel] += messages * bits_each
        self.messages[channel] += messages

    def record_bits(self, channel: str, messages: int, bits: int) -> None:
        """Account ``messages`` messages carrying ``bits`` bits in total."""
        self.record(channel, messages, 0)
        self.bits[channel] += int(bits)

    def scalars(self, channel: str, count: int) -> None:
        self.record(channel, count, SCALAR_BITS)

    def marks(self, channel: str, count: int) -> None:
        self.record(channel, count, MARK_BITS)

    def bytes(self, channel: str) -> int:
        return math.ceil(self.bits[channel] / 8)

    @property
    def bytes_node_to_node(self) -> int:
        return self.bytes("node_to_node")

    @property
    def bytes_node_to_analyzer(self) -> int:
        return self.bytes("node_to_analyzer")

    @property
    def bytes_analyzer_to_node(self) -> int:
        return self.bytes("analyzer_to_node")

    @property
    def total_bytes(self) -> int:
        return sum(self.bytes(c) for c in CHANNELS)

    def merge(self, other: "CommLedger") -> None:
        for c in CHANNELS:
            self.bits[c] += other.bits[c]
            self.messages[c] += other.messages[c]

    def as_dict(self) -> dict[str, int]:
        out = {f"bytes_{c}": self.bytes(c) for c in CHANNELS}
        out["bytes_total"] = self.total_bytes
        return out


ANALYZER = "analyzer"


@dataclass
class Delivery:
    sender: object
    recipient: object
    payload: tuple
    channel: str


def channel_between(sender, recipient) -> str:
    if sender == ANALYZER and recipient == ANALYZER:
        raise ValueError("analyzer cannot message itself")
    if sender == ANALYZER:
        return "analyzer_to_node"
    if recipient == ANALYZER:
        return "node_to_analyzer"
    return "node_to_node"


def send(sender, recipient, payload, ledger: CommLedger, *, mark: bool = False) -> Delivery:
    """Account a single message; nodes are ints, the analyzer is ``ANALYZER``."""
    channel = channel_between(sender, recipient)
    payload = tuple(np.atleast_1d(payload).tolist())
    ledger.record(channel, 1, len(payload) * (MARK_BITS if mark else SCALAR_BITS))
    return Delivery(sender, recipient, payload, channel)


def broadcast(values, recipients: int, ledger: CommLedger) -> None:
    """Analyzer sends the same scalars to ``recipients`` nodes."""
    ledger.record("analyzer_to_node", recipients, len(np.atleast_1d(values)) * SCALAR_BITS)


def round_max(values) -> float:
    """Largest absolute published value; 0 when nothing was published."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


@dataclass
class Transcript:
    """Published values per round, for debugging and replay checks."""

    rounds: list[dict] = field(default_factory=list)
    marks: np.ndarray | None = None

    def publish(self, rnd: int, label: str, nodes, values, maximum: float | None = None) -> None:
        nodes = np.asarray(nodes, dtype=np.int64)
        values = np.asarray(values)
        if np.unique(nodes).size != nodes.size:
            raise ValueError(f"round {rnd}: a node published twice")
        self.rounds.append({"round": rnd, "label": label, "nodes": nodes,
                            "values": values, "max": maximum})

    def dump(self, fh: TextIO) -> None:
        if self.marks is not None:
            for i, r in enumerate(self.marks.tolist()):
                fh.write(f"mark\t{i}\t{r}\n")
        for entry in self.rounds:
            if entry["max"] is not None:
                fh.write(f"{entry['round']}\t{entry['label']}\tmax\t{entry['max']!r}\n")
            for node, val in zip(entry["nodes"].tolist(), entry["values"].tolist()):
                fh.write(f"{entry['round']}\t{entry['label']}\t{node}\t{val!r}\n")
