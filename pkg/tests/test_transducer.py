from layerwise.cantor import BitStream
from layerwise.transducer import OpenNatSet, PrefixExtender


def marker(w, n):
    return "1" * (n + 1) + "0"


def test_blank_events_copy_and_values_insert():
    p = BitStream.from_seed(1)
    t = PrefixExtender(OpenNatSet((None, None, 2, None, 2, 0)), p, marker)
    out = t.output.prefix(20)
    assert out == p.prefix(2) + "1110" + p.bits(2, 3) + "10" + p.bits(3, 14)
    assert [e["consumed"] for e in t.trace.of_phase("insert")] == [2, 0]
    assert len(t.trace.of_phase("repeat")) == 1


def test_tail_alignment():
    p = BitStream.from_seed(2)
    t = PrefixExtender(OpenNatSet((None, 3, None)), p, marker)
    N, M = t.tail_alignment()
    assert (N, M) == (1 + 5 + 1, 2)
    assert t.output.bits(N, N + 300) == p.bits(M, M + 300)


def test_no_events_means_identity():
    p = BitStream.from_seed(3)
    t = PrefixExtender(OpenNatSet(), p, marker)
    assert t.output.prefix(100) == p.prefix(100)
    assert t.tail_alignment() == (0, 0)


def test_trace_jsonl_is_stable():
    runs = [PrefixExtender(OpenNatSet.of(1, 4), BitStream.from_seed(0), marker) for _ in range(2)]
    for r in runs:
        r.settle()
    assert runs[0].trace.to_jsonl() == runs[1].trace.to_jsonl()
