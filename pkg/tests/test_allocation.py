"""Allocation-table construction and cost-formula tests."""

from fractions import Fraction

import pytest

from mvcode.allocation import (
    VersionSet,
    all_states,
    build_construction_table,
    build_replication_table,
    build_simple_mds_table,
    construction_alpha,
    recovery_threshold,
    table_from_json,
    table_to_json,
)

F = Fraction
S = VersionSet.of


class TestRecoveryThreshold:
    def test_known_values(self):
        assert recovery_threshold(7, 3) == 3
        assert recovery_threshold(2, 2) == 2
        assert recovery_threshold(8, 5) == 2  # 8 <= 16, ceil(8/4)

    def test_single_version_gives_t_equal_c(self):
        for c in range(1, 12):
            assert recovery_threshold(c, 1) == c

    def test_branch_boundary_consistent(self):
        # at c = (nu-1)^2 both branch formulas coincide
        for nu in range(2, 7):
            c = (nu - 1) ** 2
            low = -(-c // (nu - 1))
            high = -(-(c - 1) // nu) + 1
            assert low == high == recovery_threshold(c, nu)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            recovery_threshold(0, 1)
        with pytest.raises(ValueError):
            recovery_threshold(3, 0)


class TestConstructionAlpha:
    def test_known_values(self):
        assert construction_alpha(2, 2) == F(3, 4)
        assert construction_alpha(5, 3) == F(7, 15)
        assert construction_alpha(7, 3) == F(1, 3)

    def test_single_version_is_mds(self):
        for c in range(1, 20):
            assert construction_alpha(c, 1) == F(1, c)

    def test_two_version_closed_forms(self):
        # 2/(c+1) for odd c, 2(c+1)/(c(c+2)) for even c
        for c in range(2, 40):
            expected = F(2, c + 1) if c % 2 == 1 else F(2 * (c + 1), c * (c + 2))
            assert construction_alpha(c, 2) == expected

    def test_divisible_case_closed_form(self):
        for nu in range(1, 7):
            for c in range(1, 40):
                if (c - 1) % nu == 0:
                    assert construction_alpha(c, nu) == F(nu, c + nu - 1)

    def test_explicit_piecewise_form(self):
        for nu in range(1, 7):
            for c in range(1, 31):
                t = recovery_threshold(c, nu)
                if t < nu and (t - 1) * nu + 1 <= c <= (nu - 1) * t:
                    expected = F(1, t)
                else:
                    expected = F(nu * t - nu + 1, t * c)
                assert construction_alpha(c, nu) == expected

    def test_never_worse_than_baselines(self):
        for nu in range(1, 7):
            for c in range(1, 31):
                alpha = construction_alpha(c, nu)
                assert alpha <= min(F(1), F(nu, c))
                if 2 <= nu <= c - 1:
                    assert alpha < min(F(1), F(nu, c))


class TestConstructionTable:
    def test_c2_nu2_rows(self):
        table = build_construction_table(2, 2)
        assert table.alpha == F(3, 4)
        assert table.entries[S(1, 2)] == {1: F(1, 4), 2: F(1, 2)}
        assert table.entries[S(1)] == {1: F(3, 4)}
        assert table.entries[S(2)] == {2: F(1, 2)}

    def test_c7_nu3_latest_only(self):
        table = build_construction_table(7, 3)
        assert table.alpha == F(1, 3)
        for state in all_states(3):
            row = table.entries[state]
            for v in state:
                assert row[v] == (F(1, 3) if v == state.latest() else F(0))

    def test_c5_nu3_full_grid(self):
        table = build_construction_table(5, 3)
        assert table.alpha == F(7, 15)
        expected = {
            S(1): {1: F(7, 15)},
            S(2): {2: F(1, 3)},
            S(1, 2): {1: F(2, 15), 2: F(1, 3)},
            S(3): {3: F(1, 3)},
            S(1, 3): {1: F(2, 15), 3: F(1, 3)},
            S(2, 3): {2: F(0), 3: F(1, 3)},
            S(1, 2, 3): {1: F(2, 15), 2: F(0), 3: F(1, 3)},
        }
        assert dict(table.entries) == expected

    def test_tables_validate(self):
        for nu in range(1, 5):
            for c in range(1, 9):
                build_construction_table(c, nu).validate()


class TestBaselineTables:
    def test_replication_rows(self):
        table = build_replication_table(2)
        assert table.alpha == F(1)
        assert table.entries[S(1, 2)] == {2: F(1)}
        assert table.entries[S(1)] == {1: F(1)}
        table.validate()
        build_replication_table(1).validate()

    def test_mds_rows(self):
        table = build_simple_mds_table(2, 2)
        assert table.alpha == F(1)
        assert table.entries[S(1, 2)] == {1: F(1, 2), 2: F(1, 2)}
        assert build_simple_mds_table(3, 1).alpha == F(1, 3)
        table.validate()


class TestVersionSet:
    def test_latest_and_membership(self):
        s = S(1, 3)
        assert s.latest() == 3
        assert 1 in s and 2 not in s and 3 in s
        assert s.members() == (1, 3)

    def test_empty_has_no_latest(self):
        with pytest.raises(ValueError):
            VersionSet().latest()

    def test_canonical_mask(self):
        assert S(2, 1).mask == S(1, 2).mask == 0b11


def test_json_round_trip():
    for table in (
        build_construction_table(5, 3),
        build_replication_table(2, c=4),
        build_simple_mds_table(3, 2),
    ):
        assert table_from_json(table_to_json(table)) == table
