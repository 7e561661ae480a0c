import os
import shutil

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphmean.align import align
from graphmean.data import (
    LETTER_SCHEMA,
    LETTERS,
    Dataset,
    GeneratorSpec,
    Schema,
    generate,
    letter_prototype,
    load_dataset,
    native_parse,
    native_serialize,
    normalize_attributes,
    parse_cxl,
    parse_gxl,
    write_cxl,
    write_gxl,
)
from graphmean.errors import InvalidArgumentError, ParseError
from graphmean.frechet import Sample
from graphmean.graph import AttributedGraph
from graphmean.means import MeanConfig, med, mmm
from oracles import random_graph

FIXTURE = os.path.join(os.path.dirname(__file__), "data", "letters")
XY = Schema(attr_dim=2, node={"x": 0, "y": 1})


def gxl(body, mode="undirected"):
    return f'<?xml version="1.0"?><gxl><graph id="g" edgemode="{mode}">{body}</graph></gxl>'.encode()


def node(nid, **attrs):
    inner = "".join(f'<attr name="{k}"><float>{v}</float></attr>' for k, v in attrs.items())
    return f'<node id="{nid}">{inner}</node>'


class TestGXL:
    def test_single_node(self):
        g = parse_gxl(gxl(node("a", x=1.0, y=2.0)), XY)
        assert g.order == 1
        np.testing.assert_array_equal(g.attrs[0, 0], [1.0, 2.0])

    def test_document_order_and_symmetrised_edges(self):
        g = parse_gxl(gxl(node("b", x=5, y=0) + node("a", x=1, y=1) + '<edge from="a" to="b"/>'), LETTER_SCHEMA)
        np.testing.assert_array_equal(g.attrs[0, 0], [5, 0, 0])
        np.testing.assert_array_equal(g.attrs[0, 1], [0, 0, 1])
        np.testing.assert_array_equal(g.attrs[1, 0], [0, 0, 1])

    def test_directed_edges_are_kept_one_way(self):
        g = parse_gxl(gxl(node("a", x=1, y=1) + node("b", x=2, y=2) + '<edge from="a" to="b"/>', "directed"), LETTER_SCHEMA)
        assert g.directed and g.attrs[0, 1, 2] == 1 and g.attrs[1, 0, 2] == 0

    def test_edge_attributes_and_categories(self):
        schema = Schema(attr_dim=4, node={"x": 0}, edge={"w": 1}, categorical={"kind": {"arc": 2, "line": 3}})
        doc = gxl(
            node("a", x=1)
            + '<node id="b"><attr name="x"><int>2</int></attr><attr name="kind"><string>arc</string></attr></node>'
            + '<edge from="a" to="b"><attr name="w"><float>0.5</float></attr></edge>'
        )
        g = parse_gxl(doc, schema)
        np.testing.assert_array_equal(g.attrs[1, 1], [2, 0, 1, 0])
        np.testing.assert_array_equal(g.attrs[0, 1], [0, 0.5, 0, 0])

    @pytest.mark.parametrize(
        "doc, fragment",
        [
            (gxl(node("a", x=1) + '<edge from="a" to="zz"/>'), "unknown node"),
            (gxl(node("a", x=1, color=3)), "unknown attribute 'color'"),
            (b"<gxl><graph><node id='a'>", "malformed XML"),
            (gxl(""), "no nodes"),
            (gxl(node("a", x=1) + node("a", x=2)), "duplicate"),
        ],
    )
    def test_errors_carry_a_location(self, doc, fragment):
        with pytest.raises(ParseError) as err:
            parse_gxl(doc, LETTER_SCHEMA, source="f.gxl")
        assert fragment in str(err.value)
        assert str(err.value).startswith("f.gxl")

    def test_unlabelled_edges_need_an_indicator(self):
        with pytest.raises(ParseError):
            parse_gxl(gxl(node("a", x=1, y=0) + node("b", x=2, y=0) + '<edge from="a" to="b"/>'), XY)

    def test_writer_round_trip(self):
        g = letter_prototype("M")
        assert parse_gxl(write_gxl(g), LETTER_SCHEMA).equals(g)

    def test_schema_validation(self):
        with pytest.raises(InvalidArgumentError):
            Schema(attr_dim=2, node={"x": 2})
        assert Schema.from_dict({"attr_dim": 3, "node": {"x": 0, "y": 1}, "edge_indicator": 2}) == LETTER_SCHEMA


class TestLoadDataset:
    def test_fixture(self):
        ds = load_dataset(FIXTURE, "index.cxl")
        assert len(ds.sample) == 10
        assert ds.classes() == ["A", "H", "T"]
        assert ds.sample.attr_dim == 3

    def test_three_file_subset_with_splits(self, tmp_path):
        for f in ("AP1_0000.gxl", "HP1_0004.gxl", "TP1_0008.gxl"):
            shutil.copy(os.path.join(FIXTURE, f), tmp_path)
        (tmp_path / "train.cxl").write_bytes(write_cxl([("AP1_0000.gxl", "A"), ("HP1_0004.gxl", "H")]))
        (tmp_path / "test.cxl").write_bytes(write_cxl([("TP1_0008.gxl", "T")]))
        ds = load_dataset(str(tmp_path), {"train": "train.cxl", "test": "test.cxl"})
        assert ds.labels == ("A", "H", "T")
        assert ds.splits == {"train": [0, 1], "test": [2]}
        assert len(ds.split("train").sample) == 2

    def test_empty_index_and_missing_files(self, tmp_path):
        (tmp_path / "empty.cxl").write_bytes(write_cxl([]))
        with pytest.raises(ParseError):
            load_dataset(str(tmp_path), "empty.cxl")
        (tmp_path / "bad.cxl").write_bytes(write_cxl([("nope.gxl", "A")]))
        with pytest.raises(ParseError):
            load_dataset(str(tmp_path), "bad.cxl")
        with pytest.raises(ParseError):
            load_dataset(str(tmp_path), "absent.cxl")

    def test_reload_is_byte_identical(self):
        a = native_serialize(load_dataset(FIXTURE, "index.cxl"))
        b = native_serialize(load_dataset(FIXTURE, "index.cxl"))
        assert a == b

    def test_cxl_parser(self):
        assert parse_cxl(write_cxl([("a.gxl", "A")])) == [("a.gxl", "A")]


class TestDataset:
    def test_split_invariants(self):
        s = Sample([AttributedGraph.zeros(1)] * 3, ["a", "b", "a"])
        with pytest.raises(InvalidArgumentError):
            Dataset("d", s, {"train": [0, 1], "test": [1]})
        with pytest.raises(InvalidArgumentError):
            Dataset("d", s, {"train": [5]})
        with pytest.raises(InvalidArgumentError):
            Dataset("d", Sample([AttributedGraph.zeros(1)]), {"train": [0]})
        assert Dataset("d", s).by_class() == {"a": [0, 2], "b": [1]}


class TestNative:
    def test_zero_graph(self):
        g = AttributedGraph.zeros(3, 2)
        assert native_parse(native_serialize(g)).equals(g)

    def test_nan_is_rejected(self):
        class Fake:
            pass

        with pytest.raises(InvalidArgumentError):
            native_serialize(Fake())
        bad = b'{"kind": "graph", "order": 1, "attr_dim": 1, "attrs": [[[NaN]]]}'
        with pytest.raises(ParseError):
            native_parse(bad)

    def test_canonical_and_newline_terminated(self):
        b = native_serialize(AttributedGraph.zeros(1))
        assert b.endswith(b"\n") and b.count(b"\n") == 1
        assert b.index(b'"attr_dim"') < b.index(b'"attrs"') < b.index(b'"kind"')

    def test_dataset_round_trip(self):
        ds = generate(GeneratorSpec(count=2, noise_sigma=0.3, seed=1))
        ds = Dataset(ds.name, ds.sample, {"train": [0, 1], "test": [2]}, ds.provenance)
        back = native_parse(native_serialize(ds))
        assert back.labels == ds.labels and back.splits == ds.splits and back.name == ds.name
        assert all(a.equals(b) for a, b in zip(back.graphs, ds.graphs))

    @pytest.mark.parametrize(
        "doc",
        [b"not json", b"[]", b'{"kind": "graph", "order": 2, "attr_dim": 1, "attrs": [[[1]]]}', b'{"kind": "dataset", "graphs": []}'],
    )
    def test_schema_violations(self, doc):
        with pytest.raises(ParseError):
            native_parse(doc)

    @given(st.integers(0, 2**32 - 1))
    def test_random_graphs_round_trip_bitwise(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, int(rng.integers(1, 7)), dim=int(rng.integers(1, 4)), low=-1e6, high=1e6)
        back = native_parse(native_serialize(g))
        assert back.attrs.tobytes() == g.attrs.tobytes()

    def test_gxl_fixture_native_round_trip(self):
        ds = load_dataset(FIXTURE, "index.cxl")
        once = native_serialize(ds)
        assert native_serialize(native_parse(once)) == once


class TestGenerator:
    def test_noise_free_copies(self):
        proto = letter_prototype("K")
        ds = generate(GeneratorSpec(prototype=proto, count=5, noise_sigma=0, structural_noise=0))
        assert len(ds.sample) == 5 and all(g.equals(proto) for g in ds.graphs)

    def test_same_seed_same_bytes(self):
        spec = GeneratorSpec(count=3, noise_sigma=0.2, structural_noise=0.1, seed=42)
        assert native_serialize(generate(spec)) == native_serialize(generate(spec))
        other = GeneratorSpec(count=3, noise_sigma=0.2, structural_noise=0.1, seed=43)
        assert native_serialize(generate(spec)) != native_serialize(generate(other))

    def test_default_letters(self):
        ds = generate(GeneratorSpec(count=2))
        assert ds.classes() == sorted(LETTERS)

    def test_structural_noise_toggles_edges(self):
        proto = letter_prototype("N")
        ds = generate(GeneratorSpec(prototype=proto, count=20, noise_sigma=0.1, structural_noise=0.5, seed=3))
        base = np.any(proto.attrs != 0, axis=2)
        changed = [not np.array_equal(np.any(g.attrs != 0, axis=2), base) for g in ds.graphs]
        assert any(changed)
        for g in ds.graphs:
            assert np.array_equal(g.attrs, g.attrs.transpose(1, 0, 2))

    def test_random_uniform(self):
        ds = generate(GeneratorSpec(family="random-uniform", count=30, order_range=(2, 4), attr_dim=3, seed=1))
        assert all(2 <= g.order <= 4 and g.attr_dim == 3 for g in ds.graphs)
        assert all(0 <= v < 1 for g in ds.graphs for v in g.attrs.ravel())

    @pytest.mark.parametrize(
        "kw",
        [{"count": 0}, {"noise_sigma": -1}, {"structural_noise": 1.5}, {"family": "trees"}, {"order_range": (4, 2)}],
    )
    def test_invalid_specs(self, kw):
        with pytest.raises(InvalidArgumentError):
            GeneratorSpec(**kw)

    def test_mmm_mean_beats_the_medoid_at_recovering_the_prototype(self):
        proto = letter_prototype("F")
        wins = 0
        for trial in range(20):
            s = generate(GeneratorSpec(prototype=proto, count=50, noise_sigma=0.05, seed=trial)).sample
            m = mmm(s, MeanConfig(seed=trial)).mean
            wins += align(m, proto).cost < align(med(s).mean, proto).cost
        assert wins >= 16


class TestNormalization:
    def test_z_scores(self):
        ds = Dataset("d", Sample([AttributedGraph(np.array([[[v]]])) for v in (1.0, 2.0, 3.0)]))
        out, tf = normalize_attributes(ds)
        got = [g.attrs[0, 0, 0] for g in out.graphs]
        assert got == pytest.approx([-1.224744871391589, 0.0, 1.224744871391589], abs=1e-12)
        assert tf.node_std[0] == pytest.approx(np.sqrt(2 / 3))

    def test_idempotent(self):
        ds = generate(GeneratorSpec(count=3, noise_sigma=0.3, seed=2))
        once, _ = normalize_attributes(ds)
        twice, _ = normalize_attributes(once)
        for a, b in zip(once.graphs, twice.graphs):
            np.testing.assert_allclose(a.attrs, b.attrs, atol=1e-12)

    def test_two_scale_data_gets_unit_statistics(self, rng):
        graphs = []
        for _ in range(20):
            g = random_graph(rng, int(rng.integers(2, 6)), dim=2, low=0.5, high=1.5)
            graphs.append(AttributedGraph(g.attrs * np.array([1.0, 1000.0])))
        out, _ = normalize_attributes(Dataset("grec", Sample(graphs)))
        nodes = np.concatenate([g.attrs[np.arange(g.order), np.arange(g.order)] for g in out.graphs])
        edges = []
        for src, g in zip(graphs, out.graphs):
            mask = np.any(src.attrs != 0, axis=2)
            np.fill_diagonal(mask, False)
            edges.append(g.attrs[mask])
        edges = np.concatenate(edges)
        np.testing.assert_allclose(nodes.std(axis=0), 1.0, atol=1e-9)
        np.testing.assert_allclose(nodes.mean(axis=0), 0.0, atol=1e-9)
        np.testing.assert_allclose(edges.std(axis=0), 1.0, atol=1e-9)

    def test_non_edges_stay_zero_and_inverse_recovers(self):
        ds = generate(GeneratorSpec(count=3, noise_sigma=0.3, seed=4))
        out, tf = normalize_attributes(ds)
        for src, g in zip(ds.graphs, out.graphs):
            mask = ~np.any(src.attrs != 0, axis=2)
            np.fill_diagonal(mask, False)
            assert not g.attrs[mask].any()
            np.testing.assert_allclose(tf.invert(g).attrs, src.attrs, atol=1e-9)

    def test_constant_dimension_keeps_unit_scale(self):
        ds = generate(GeneratorSpec(count=3, noise_sigma=0.0, seed=4))
        out, tf = normalize_attributes(ds)
        # the edge indicator is always 1: zero variance, std replaced by 1
        assert tf.edge_std[2] == 1.0
        assert np.isfinite(np.concatenate([g.attrs.ravel() for g in out.graphs])).all()
