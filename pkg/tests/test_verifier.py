"""Verifier tests: combinatorial feasibility and end-to-end codec sweeps."""

from fractions import Fraction
from itertools import product

import pytest

from mvcode.allocation import (
    AllocationTable,
    VersionSet,
    all_states,
    build_construction_table,
    build_replication_table,
    build_simple_mds_table,
)
from mvcode.verifier import (
    BudgetExceededError,
    exhaustive_codec_check,
    feasibility_check,
    worst_case_cost,
)

S = VersionSet.of


def corrupt_allocation(table, state, version, value):
    entries = {s: dict(row) for s, row in table.entries.items()}
    entries[state][version] = value
    return AllocationTable(table.n_versions, table.quorum, entries, table.alpha)


class TestFeasibility:
    def test_construction_tables_pass(self):
        for c, nu in ((2, 2), (3, 2), (5, 3), (7, 3), (4, 3)):
            assert feasibility_check(build_construction_table(c, nu), c) is None

    def test_replication_passes_any_quorum(self):
        for c in range(1, 5):
            for nu in range(1, 4):
                assert feasibility_check(build_replication_table(nu, c), c) is None

    def test_mds_passes(self):
        for c in range(1, 5):
            for nu in range(1, 4):
                assert feasibility_check(build_simple_mds_table(c, nu), c) is None

    def test_corrupted_table_caught_with_witness(self):
        bad = corrupt_allocation(build_construction_table(2, 2), S(2), 2, Fraction(1, 4))
        violation = feasibility_check(bad, 2)
        assert violation is not None
        assert violation.reason == "no-version-covered"
        assert violation.system_state == (S(2), S(2))  # total 1/2 < 1

    def test_multiset_reduction_matches_ordered_tuples(self):
        # brute-force oracle over ordered c-tuples of nonempty states
        def ordered_ok(table, c):
            nu = table.n_versions
            for tup in product(all_states(nu), repeat=c):
                common = tup[0]
                for s in tup[1:]:
                    common = common.intersection(s)
                if not common:
                    continue
                floor = common.latest()
                if not any(
                    sum(table.allocation(s, v) for s in tup) >= 1
                    for v in range(floor, nu + 1)
                ):
                    return False
            return True

        good = build_construction_table(2, 2)
        bad = corrupt_allocation(good, S(2), 2, Fraction(1, 4))
        for table in (good, bad, build_simple_mds_table(3, 2)):
            c = table.quorum
            assert (feasibility_check(table, c) is None) == ordered_ok(table, c)


class TestWorstCaseCost:
    def test_family_costs(self):
        assert worst_case_cost(build_construction_table(2, 2)) == Fraction(3, 4)
        assert worst_case_cost(build_simple_mds_table(2, 2)) == Fraction(1)
        assert worst_case_cost(build_replication_table(2)) == Fraction(1)

    def test_matches_alpha_for_generated_tables(self):
        for c, nu in ((2, 2), (5, 3), (7, 3)):
            table = build_construction_table(c, nu)
            assert worst_case_cost(table) == table.alpha


class TestExhaustiveCodecCheck:
    def test_small_construction_instances_pass(self):
        assert exhaustive_codec_check(build_construction_table(2, 2), 3, 2) is None
        assert exhaustive_codec_check(build_construction_table(3, 3), 4, 3) is None

    def test_mds_passes_same_sweep(self):
        assert exhaustive_codec_check(build_simple_mds_table(2, 2), 3, 2) is None

    def test_feasible_implies_decodable_small_sweep(self):
        # the combinatorial certificate must agree with the end-to-end check
        for nu in (1, 2, 3):
            for n in range(1, 5):
                for c in range(1, n + 1):
                    for table in (
                        build_construction_table(c, nu),
                        build_replication_table(nu, c),
                        build_simple_mds_table(c, nu),
                    ):
                        assert feasibility_check(table, c) is None
                        assert exhaustive_codec_check(table, n, c) is None

    def test_corrupted_table_yields_violation(self):
        bad = corrupt_allocation(build_construction_table(2, 2), S(2), 2, Fraction(1, 4))
        violation = exhaustive_codec_check(bad, 3, 2)
        assert violation is not None
        assert violation.reason == "no-version-covered"

    def test_budget_guard(self):
        table = build_construction_table(2, 2)
        with pytest.raises(BudgetExceededError):
            exhaustive_codec_check(table, 14, 2)

    def test_quorum_larger_than_n_rejected(self):
        with pytest.raises(ValueError):
            exhaustive_codec_check(build_construction_table(3, 2), 2, 3)

    def test_wrong_value_decoder_caught(self):
        from mvcode.codec import Codec, DecodeResult

        table = build_construction_table(2, 2)

        class LyingCodec(Codec):
            def decode(self, symbols):
                result = super().decode(symbols)
                if result.is_null:
                    return result
                return DecodeResult(result.version, bytes(len(result.value)))

        violation = exhaustive_codec_check(table, 3, 2, codec=LyingCodec(table, 3))
        assert violation is not None
        assert violation.reason == "wrong-value"
