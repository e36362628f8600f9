"""Construction semantics, frozen small tables, and document round trips."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppl.padic import legendre, unit_part, valuation
from ppl.partitions import (
    Partition,
    build_legendre,
    build_modular,
    build_valuation_parity,
    floor_log2,
    partition_from_doc,
    partition_to_doc,
    trivial_partition,
)

# Greedy table for k=3, primes (2,3), checked by hand: exponents are (2,1)
# since 2^2 is the least power of 2 reaching 3, and each vector goes to the
# smallest part value absent from its components.
K3_TABLE = {
    (0, 0): 2, (0, 1): 3, (0, 2): 2,
    (1, 0): 3, (1, 1): 1, (1, 2): 1,
    (2, 0): 2, (2, 1): 1, (2, 2): 1,
    (3, 0): 2, (3, 1): 1, (3, 2): 1,
}


def test_modular_k3_table_is_frozen_oracle():
    part = build_modular(3, (2, 3))
    assert part.exponents == (2, 1)
    assert part.table == K3_TABLE


def test_modular_k2_is_odd_even_split():
    part = build_modular(2, (2,))
    assert part.exponents == (1,)
    got = [part.classify(n) for n in range(1, 11)]
    assert got == [1, 2, 1, 2, 1, 2, 1, 2, 1, 2]


def test_modular_exponents_are_minimal():
    part = build_modular(4, (2, 3, 5))
    assert part.exponents == (2, 2, 1)  # 4, 9, 5 are the least powers >= 4


@pytest.mark.parametrize(
    "build,k,primes",
    [
        (build_modular, 2, (2,)),
        (build_modular, 3, (2, 3)),
        (build_modular, 4, (2, 3, 5)),
        (build_valuation_parity, 4, (2, 3)),
        (build_valuation_parity, 5, (2, 3)),
        (build_legendre, 2, (3,)),
        (build_legendre, 6, (2, 5)),
    ],
)
def test_classify_range_matches_pointwise(build, k, primes):
    part = build(k, primes)
    arr = part.classify_range(400)
    for n in range(1, 401):
        assert arr[n] == part.classify(n)
        assert 1 <= arr[n] <= k


def test_modular_parts_avoid_their_residue():
    # the defining invariant: part j+1 never meets j mod p_i^{e_i}
    for k, primes in [(2, (2,)), (3, (2, 3)), (4, (2, 3, 5))]:
        part = build_modular(k, primes)
        moduli = [p**e for p, e in zip(part.primes, part.exponents)]
        for n in range(1, 3000):
            j = part.classify(n) - 1
            assert all(n % m != j for m in moduli), (k, n)


def test_valuation_parity_base_parts():
    part = build_valuation_parity(4, (2, 3))
    assert part.base_parts == 4
    assert part.refinement_pieces == 1
    for n in range(1, 2000):
        bits = (valuation(n, 2) % 2) | ((valuation(n, 3) % 2) << 1)
        assert part.classify(n) == bits + 1
    assert part.classify(6) == 4  # v2 = v3 = 1, both odd


def test_legendre_base_parts():
    part = build_legendre(4, (2, 3))
    for n in range(1, 2000):
        bits = (legendre(unit_part(n, 2), 2) < 0) | ((legendre(unit_part(n, 3), 3) < 0) << 1)
        assert part.classify(n) == bits + 1
    two = build_legendre(2, (3,))
    assert two.classify(2) == 2  # 2 is a nonresidue mod 3
    assert two.classify(12) == 1  # unit part 4 is a square
    assert build_legendre(2, (2,)).classify(5) == 1  # 5 = 1 (mod 4)


def test_refinement_splits_last_base_part():
    part = build_valuation_parity(5, (2, 3))
    assert part.base_parts == 4 and part.refinement_pieces == 2
    for n in range(1, 3000):
        got = part.classify(n)
        bits = (valuation(n, 2) % 2) | ((valuation(n, 3) % 2) << 1)
        if bits + 1 < 4:
            assert got == bits + 1
        else:
            assert got == 4 + n % 2


def test_refinement_can_leave_a_part_empty():
    # with one prime and k=3 the split variable n mod 2 is constant on the
    # odd-valuation base part, so part 3 is empty; the partition axioms
    # still hold and the builder does not reject it
    part = build_valuation_parity(3, (2,))
    arr = part.classify_range(10_000)
    assert 3 not in arr[1:]
    assert set(arr[1:]) == {1, 2}


def test_parts_partition_the_window():
    for part in (build_modular(3, (2, 3)), build_valuation_parity(6, (2, 3)), build_legendre(2, (2,))):
        arr = part.classify_range(500)
        assert all(1 <= x <= part.k for x in arr[1:])


def test_trivial_partition():
    part = trivial_partition()
    assert part.k == 1
    assert [part.classify(n) for n in (1, 17, 99)] == [1, 1, 1]
    assert build_modular(1, ()).classify(5) == 1


def test_floor_log2():
    assert [floor_log2(k) for k in (1, 2, 3, 4, 7, 8)] == [0, 1, 1, 2, 2, 3]
    with pytest.raises(ValueError):
        floor_log2(0)


def test_builder_rejections():
    with pytest.raises(ValueError, match="k-1"):
        build_modular(3, (2,))
    with pytest.raises(ValueError, match="distinct"):
        build_modular(3, (2, 2))
    with pytest.raises(ValueError, match="floor"):
        build_valuation_parity(4, (2,))
    with pytest.raises(ValueError, match="increasing"):
        build_legendre(4, (3, 2))
    with pytest.raises(ValueError):
        build_modular(0, ())
    with pytest.raises(ValueError):
        build_legendre(2, (4,))


def test_table_cap_is_enforced():
    with pytest.raises(ValueError, match="cap"):
        build_modular(3, (2, 3), table_cap=5)


@pytest.mark.parametrize(
    "build,k,primes",
    [
        (build_modular, 3, (2, 3)),
        (build_modular, 4, (2, 3, 5)),
        (build_valuation_parity, 5, (2, 3)),
        (build_legendre, 2, (2,)),
        (build_valuation_parity, 1, ()),
    ],
)
def test_doc_round_trip_preserves_classification(build, k, primes):
    part = build(k, primes)
    doc = json.loads(json.dumps(partition_to_doc(part)))
    back = partition_from_doc(doc)
    arr1 = part.classify_range(1000)
    arr2 = back.classify_range(1000)
    assert arr1 == arr2


def test_from_doc_rejects_tampering():
    doc = partition_to_doc(build_modular(3, (2, 3)))

    def broken(mutate):
        bad = json.loads(json.dumps(doc))
        mutate(bad)
        with pytest.raises(ValueError):
            partition_from_doc(bad)

    broken(lambda d: d.pop("table"))
    broken(lambda d: d["table"].pop())  # incomplete cover
    broken(lambda d: d["table"].append(dict(d["table"][0])))  # duplicate vector
    broken(lambda d: d["table"][0].update(part=9))
    broken(lambda d: d["table"][5].update(part=d["table"][5]["vector"][0] + 1))  # avoided residue
    broken(lambda d: d.update(construction="mystery"))
    broken(lambda d: d.update(extra=1))
    broken(lambda d: d.update(exponents=[1, 1]))  # 2^1 < k
    broken(lambda d: d.update(k=0))
    broken(lambda d: d.update(primes=[2, 2]))


def test_from_doc_rejects_misplaced_fields():
    doc = partition_to_doc(build_valuation_parity(4, (2, 3)))
    doc["table"] = []
    with pytest.raises(ValueError, match="modular"):
        partition_from_doc(doc)
    refined = partition_to_doc(build_valuation_parity(5, (2, 3)))
    refined["refinement"]["pieces"] = 3
    with pytest.raises(ValueError, match="refinement"):
        partition_from_doc(refined)


def test_describe_summaries():
    mod = build_modular(3, (2, 3)).describe()
    assert mod == {
        "construction": "modular",
        "k": 3,
        "primes": [2, 3],
        "exponents": [2, 1],
        "table_size": 12,
    }
    vp = build_valuation_parity(5, (2, 3)).describe()
    assert vp["base_parts"] == 4 and vp["refinement_pieces"] == 2


@given(st.integers(min_value=1, max_value=10**7))
@settings(max_examples=200)
def test_classify_is_stable_under_reconstruction(n):
    part = build_modular(3, (2, 3))
    again = partition_from_doc(partition_to_doc(part))
    assert part.classify(n) == again.classify(n)
