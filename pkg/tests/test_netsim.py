import io

import numpy as np
import pytest

from ldpcount.netsim import ANALYZER, CommLedger, Transcript, broadcast, round_max, send


def test_send_costs():
    led = CommLedger()
    d = send(0, 1, 3.5, led)
    assert d.channel == "node_to_node" and led.bytes_node_to_node == 8
    send(2, ANALYZER, [1], led, mark=True)
    assert led.bytes_node_to_analyzer == 1
    broadcast(2.0, 5, led)
    assert led.bytes_analyzer_to_node == 40
    assert led.total_bytes == 49
    assert led.messages == {"node_to_node": 1, "node_to_analyzer": 1, "analyzer_to_node": 5}


def test_bits_round_up_to_bytes():
    led = CommLedger()
    led.record_bits("node_to_analyzer", 3, 10)
    assert led.bytes_node_to_analyzer == 2


def test_ledger_merge_and_validation():
    a, b = CommLedger(), CommLedger()
    a.scalars("node_to_node", 2)
    b.marks("node_to_node", 3)
    a.merge(b)
    assert a.bytes_node_to_node == 19
    with pytest.raises(ValueError):
        a.record("nowhere", 1, 8)
    with pytest.raises(ValueError):
        a.record("node_to_node", -1, 8)
    with pytest.raises(ValueError):
        send(ANALYZER, ANALYZER, 1.0, a)


def test_round_max():
    assert round_max([1, -3, 2]) == 3
    assert round_max([]) == 0
    assert round_max(np.ones(4)) == 1


def test_transcript():
    t = Transcript(marks=np.array([0, 2]))
    t.publish(1, "x", [0, 1], [1.5, -2.0], maximum=2.0)
    with pytest.raises(ValueError):
        t.publish(2, "x", [1, 1], [0.0, 0.0])
    buf = io.StringIO()
    t.dump(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "mark\t0\t0"
    assert "1\tx\tmax\t2.0" in lines
    assert lines[-1] == "1\tx\t1\t-2.0"
