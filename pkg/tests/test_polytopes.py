"""
分层多面体测试：树枚举、胞腔计数、覆盖关系与菱形性质
"""

import json

import pytest

from gcq_cli.core.errors import ResourceGuardError, StructuralError
from gcq_cli.polytopes import (
    MAX_ARITY_SUM,
    PlanarTree,
    boundary_f2_squares_to_zero,
    build_poset,
    covers,
    diamond_check,
    enumerate_associahedron,
    enumerate_leveled_trees,
    enumerate_trees,
    f_vector,
    f_vector_csv,
    is_graded,
    poset_to_json,
    project_bipermutahedron,
)


class TestTrees:
    @pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 11), (5, 45)])
    def test_tree_counts(self, n, count):
        assert len(enumerate_trees(n)) == count

    def test_bracket(self):
        tree = PlanarTree(3, ((0, 2), (0, 1)))
        assert tree.bracket() == "((12)3)"
        assert tree.dimension() == 0
        assert PlanarTree(3, ((0, 2),)).dimension() == 1

    def test_crossing_intervals_rejected(self):
        with pytest.raises(StructuralError):
            PlanarTree(4, ((0, 3), (0, 1), (1, 2)))

    def test_root_required(self):
        with pytest.raises(StructuralError):
            PlanarTree(3, ((0, 1),))

    def test_enumerate_needs_two_leaves(self):
        with pytest.raises(StructuralError):
            enumerate_trees(1)

    @pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 13)])
    def test_leveled_trees_are_ordered_set_partitions(self, n, count):
        assert len(enumerate_leveled_trees(n)) == count


class TestBiassociahedron:
    def test_hexagon(self):
        assert f_vector(3, 2, "K") == [6, 6, 1]

    def test_dual_hexagon(self):
        assert f_vector(2, 3, "K") == [6, 6, 1]

    def test_segment(self):
        poset = build_poset(2, 2, "K")
        assert len(poset.cells) == 3
        assert f_vector(2, 2, "K") == [2, 1]

    def test_big_cell_covers_all_edges(self):
        poset = build_poset(3, 2, "K")
        top = max(poset.cells, key=lambda c: c.dimension)
        faces = covers(top)
        assert len(faces) == 6
        assert all(c.dimension == 1 for c in faces)

    @pytest.mark.parametrize("n,count", [(3, 3), (4, 11), (5, 45)])
    def test_associahedron_cells(self, n, count):
        assert len(enumerate_associahedron(n)) == count
        assert len(build_poset(1, n, "A").cells) == count

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_single_output_is_associahedron(self, n):
        k_poset, a_poset = build_poset(1, n, "K"), build_poset(1, n, "A")
        assert f_vector(1, n, "K") == f_vector(1, n, "A")
        assert sum(map(len, k_poset.covers.values())) == sum(map(len, a_poset.covers.values()))


class TestBipermutahedron:
    @pytest.mark.parametrize("n,f", [(3, [2, 1]), (4, [6, 6, 1])])
    def test_small_f_vectors(self, n, f):
        assert f_vector(1, n, "P") == f

    @pytest.mark.parametrize("n,total", [(3, 3), (4, 13), (5, 75)])
    def test_single_output_counts(self, n, total):
        assert len(build_poset(1, n, "P").cells) == total

    @pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (2, 3)])
    def test_projection_onto_biassociahedron(self, m, n):
        k_cells = build_poset(m, n, "K").cells
        images = [project_bipermutahedron(c) for c in build_poset(m, n, "P").cells]
        assert all(image in k_cells for image in images)
        assert all(c in images for c in k_cells)


@pytest.mark.parametrize("family", ["K", "P"])
@pytest.mark.parametrize("m,n", [(1, 2), (2, 1), (2, 2), (3, 1), (1, 3), (3, 2), (2, 3)])
def test_poset_axioms(family, m, n):
    assert diamond_check(m, n, family)
    assert boundary_f2_squares_to_zero(m, n, family)
    assert is_graded(m, n, family)


@pytest.mark.slow
@pytest.mark.parametrize("family", ["K", "P"])
@pytest.mark.parametrize("m,n", [(3, 3), (2, 4), (4, 2)])
def test_poset_axioms_larger(family, m, n):
    assert diamond_check(m, n, family)
    assert boundary_f2_squares_to_zero(m, n, family)


class TestGuards:
    def test_too_small(self):
        with pytest.raises(StructuralError):
            build_poset(1, 1, "K")

    def test_resource_guard(self):
        with pytest.raises(ResourceGuardError) as info:
            build_poset(4, MAX_ARITY_SUM - 3, "P")
        assert info.value.exit_code == 3

    def test_unknown_family(self):
        with pytest.raises(StructuralError):
            build_poset(2, 2, "Q")


class TestExport:
    def test_poset_json(self):
        data = json.loads(poset_to_json(3, 2, "K"))
        assert data["family"] == "K"
        assert len(data["cells"]) == 13
        assert len(data["covers"]) == 6 + 12

    def test_f_vector_csv(self):
        text = f_vector_csv([("K", 3, 2, [6, 6, 1])])
        assert text == "family,m,n,f_vector\nK,3,2,6 6 1\n"
