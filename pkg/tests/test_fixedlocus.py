import math

import numpy as np
import pytest

import vortexmoduli as vm
from vortexmoduli.errors import DegreeMismatch, ParityViolation
from vortexmoduli.fixedlocus import random_symmetric_part


def census_oracle(g, d):
    # direct expansion of the count formula: sum over k of C(2g+2, d-2k)
    return sum(
        math.comb(2 * g + 2, d - 2 * k)
        for k in range(d // 2 + 1)
        if 0 <= d - 2 * k <= 2 * g + 2
    )


class TestEnumeration:
    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6])
    def test_census_matches_oracle(self, d):
        labels = vm.enumerate_components(2, d)
        assert len(labels) == census_oracle(2, d)

    def test_g2_counts(self):
        # frozen from the oracle above
        assert [len(vm.enumerate_components(2, d)) for d in (1, 2, 3)] == [6, 16, 26]

    def test_d2_split_by_k(self):
        labels = vm.enumerate_components(2, 2)
        by_k = {}
        for lab in labels:
            by_k.setdefault(lab.k, []).append(lab)
        assert len(by_k[1]) == 1 and sum(by_k[1][0].b) == 0
        assert len(by_k[0]) == 15

    def test_parity_constraint_everywhere(self):
        for d in range(1, 7):
            for lab in vm.enumerate_components(2, d):
                assert 2 * lab.k + sum(lab.b) == d

    def test_deterministic_order(self):
        assert vm.enumerate_components(2, 3) == vm.enumerate_components(2, 3)

    def test_bad_label_rejected(self):
        with pytest.raises(ParityViolation):
            vm.ComponentLabel((1, 0, 0, 0, 0, 0), 1, 2)


class TestDimensions:
    def test_canonical_component(self):
        g = 2
        lab = vm.ComponentLabel((0,) * 6, g - 1, 2 * g - 2)
        assert vm.component_dimension(lab) == g - 1

    def test_point_component(self):
        lab = vm.ComponentLabel((1, 1, 1, 0, 0, 0), 0, 3)
        assert vm.component_dimension(lab) == 0

    def test_d2_sphere_component(self):
        lab = vm.ComponentLabel((0,) * 6, 1, 2)
        assert vm.component_dimension(lab) == 1


class TestRepresentatives:
    def test_point_component_representative(self, sextic):
        lab = vm.ComponentLabel((1, 0, 1, 0, 0, 0), 0, 2)
        D = vm.representative_divisor(sextic, lab, vm.Divisor.for_curve(sextic))
        assert D.degree == 2 and D.is_positive()
        assert D.multiplicity(sextic.ramification_point(0)) == 1

    def test_sigma_fixed(self, sextic):
        rng = np.random.default_rng(17)
        lab = vm.ComponentLabel((1, 1, 0, 0, 0, 0), 1, 4)
        D = vm.representative_divisor(
            sextic, lab, random_symmetric_part(sextic, 1, rng)
        )
        assert D.degree == 4
        assert vm.sigma_pushforward(sextic, D).equals(D)

    def test_degree_mismatch(self, sextic):
        lab = vm.ComponentLabel((0,) * 6, 1, 2)
        with pytest.raises(DegreeMismatch):
            vm.representative_divisor(sextic, lab, vm.Divisor.for_curve(sextic))

    def test_aj_independent_of_symmetric_part(self, sextic, sextic_periods, sextic_aj):
        lab = vm.ComponentLabel((0,) * 6, 1, 2)
        rng = np.random.default_rng(23)
        raws = []
        for _ in range(5):
            D = vm.representative_divisor(
                sextic, lab, random_symmetric_part(sextic, 1, rng)
            )
            raws.append(sextic_aj.raw(D))
        for raw in raws[1:]:
            assert vm.lattice_distance(sextic_periods, raw - raws[0]) <= 1e-6


class TestClassification:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_matches_bruteforce_oracle(self, sextic, sextic_periods, d):
        labels = vm.enumerate_components(2, d)
        partition = vm.classify_fibres(sextic, sextic_periods, None, labels)
        # brute-force partition from the numerical oracle alone
        ajm = vm.AbelJacobiMap(sextic, sextic_periods)
        rng = np.random.default_rng(99)
        raws = [
            ajm.raw(
                vm.representative_divisor(sextic, lab, random_symmetric_part(sextic, lab.k, rng))
            )
            for lab in labels
        ]
        n = len(labels)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(n):
            for j in range(i + 1, n):
                if vm.lattice_distance(sextic_periods, raws[i] - raws[j]) <= 1e-6:
                    parent[find(i)] = find(j)
        groups = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        oracle_classes = sorted(tuple(sorted(v)) for v in groups.values())
        assert sorted(partition.classes) == oracle_classes
        assert partition.checks["k_sum_identity"]

    def test_d3_merged_pairs(self, sextic, sextic_periods):
        labels = vm.enumerate_components(2, 3)
        partition = vm.classify_fibres(sextic, sextic_periods, None, labels)
        doubles = [cls for cls in partition.classes if len(cls) == 2]
        singletons = [cls for cls in partition.classes if len(cls) == 1]
        # exactly the 10 complementary-support triples merge, everything else alone
        assert len(doubles) == 10
        assert len(singletons) == 6
        for cls in doubles:
            a, b = (labels[i] for i in cls)
            assert a.k + b.k == 3 - 2 - 1  # k + k' = d - g - 1 = 0
            assert tuple(x + y for x, y in zip(a.b, b.b)) == (1,) * 6

    def test_small_d_all_singletons(self, sextic, sextic_periods):
        for d in (1, 2):  # d < g + 1 = 3
            labels = vm.enumerate_components(2, d)
            partition = vm.classify_fibres(sextic, sextic_periods, None, labels)
            assert all(len(cls) == 1 for cls in partition.classes)

    def test_deterministic_across_seeds(self, sextic, sextic_periods):
        labels = vm.enumerate_components(2, 3)
        p1 = vm.classify_fibres(sextic, sextic_periods, None, labels, seed=1)
        p2 = vm.classify_fibres(sextic, sextic_periods, None, labels, seed=2)
        assert p1.classes == p2.classes

    def test_representatives_disjoint_across_labels(self, sextic):
        rng = np.random.default_rng(31)
        labels = vm.enumerate_components(2, 2)
        reps = [
            vm.representative_divisor(sextic, lab, random_symmetric_part(sextic, lab.k, rng))
            for lab in labels
        ]
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                assert not reps[i].equals(reps[j])


class TestCanonicalComponent:
    def test_report_passes(self, sextic, sextic_periods):
        report = vm.canonical_component_check(sextic, sextic_periods)
        assert report["passed"]
        assert report["divisor_of_dx_over_y_matches"]
        assert report["aj_distances"][0] == 0.0
        assert all(d <= 1e-6 for d in report["aj_distances"])

    def test_genus_one_degenerate_case(self, lemniscatic, lemniscatic_periods):
        report = vm.canonical_component_check(lemniscatic, lemniscatic_periods)
        assert report["passed"]
