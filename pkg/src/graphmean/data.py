"""Datasets: GXL/CXL ingestion, a bit-exact JSON format, generators, normalisation.

GXL attributes are mapped onto attribute-vector dimensions by an explicit
:class:`Schema`; nothing is inferred from the files. The native format is canonical
JSON (sorted keys, shortest round-trip float repr), so ``parse(serialize(x))``
reproduces every finite double bitwise.
"""

import json
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from graphmean.errors import InvalidArgumentError, ParseError
from graphmean.frechet import Sample
from graphmean.graph import AttributedGraph
from graphmean.rng import SplitMix64, derive_seed

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Schema:
    """Mapping from GXL attribute names to attribute-vector dimensions.

    ``node`` and ``edge`` map numeric attribute names to a dimension. ``categorical``
    maps a string attribute name to ``{value: dimension}`` (one-hot). Attributes named
    in ``ignore`` are skipped; any other attribute is an error. ``edge_indicator`` is
    a dimension set to ``edge_value`` on every edge, needed for unlabelled edges
    (a zero edge attribute would make the edge disappear).
    """

    attr_dim: int
    node: dict = field(default_factory=dict)
    edge: dict = field(default_factory=dict)
    categorical: dict = field(default_factory=dict)
    ignore: tuple = ()
    edge_indicator: int | None = None
    edge_value: float = 1.0

    def __post_init__(self):
        if self.attr_dim < 1:
            raise InvalidArgumentError("attr_dim must be >= 1")
        dims = list(self.node.values()) + list(self.edge.values())
        dims += [d for m in self.categorical.values() for d in m.values()]
        if self.edge_indicator is not None:
            dims.append(self.edge_indicator)
        if any(not 0 <= d < self.attr_dim for d in dims):
            raise InvalidArgumentError("schema dimension out of range")

    @classmethod
    def from_dict(cls, d):
        return cls(
            attr_dim=int(d["attr_dim"]),
            node=dict(d.get("node", {})),
            edge=dict(d.get("edge", {})),
            categorical={k: dict(v) for k, v in d.get("categorical", {}).items()},
            ignore=tuple(d.get("ignore", ())),
            edge_indicator=d.get("edge_indicator"),
            edge_value=float(d.get("edge_value", 1.0)),
        )

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


LETTER_SCHEMA = Schema(attr_dim=3, node={"x": 0, "y": 1}, edge_indicator=2)


@dataclass(frozen=True)
class Dataset:
    name: str
    sample: Sample
    splits: dict | None = None
    provenance: str = ""

    def __post_init__(self):
        if self.splits is not None:
            if self.sample.labels is None:
                raise InvalidArgumentError("splits require labels")
            seen = set()
            for key, idx in self.splits.items():
                idx = list(idx)
                if any(not 0 <= i < len(self.sample) for i in idx):
                    raise InvalidArgumentError(f"split {key!r} has an index out of range")
                if seen.intersection(idx):
                    raise InvalidArgumentError("splits overlap")
                seen.update(idx)

    @property
    def graphs(self):
        return self.sample.graphs

    @property
    def labels(self):
        return self.sample.labels

    def split(self, name):
        idx = self.splits[name]
        return Dataset(f"{self.name}:{name}", self.sample.subset(idx), None, self.provenance)

    def classes(self):
        """Class labels in order of first appearance."""
        out = []
        for lab in self.labels or ():
            if lab not in out:
                out.append(lab)
        return out

    def by_class(self):
        groups = {c: [] for c in self.classes()}
        for i, lab in enumerate(self.labels):
            groups[lab].append(i)
        return groups


# --------------------------------------------------------------------------- GXL


def _value(attr_el, where):
    children = list(attr_el)
    if len(children) != 1:
        raise ParseError("attr must have exactly one value element", where)
    v = children[0]
    text = (v.text or "").strip()
    if v.tag in ("float", "double", "int"):
        try:
            return float(text)
        except ValueError:
            raise ParseError(f"bad numeric value {text!r}", where) from None
    if v.tag == "string":
        return text
    if v.tag == "bool":
        return 1.0 if text.lower() == "true" else 0.0
    raise ParseError(f"unsupported value type <{v.tag}>", where)


def _fill(vec, attr_el, numeric, schema, where):
    name = attr_el.get("name")
    if name in schema.ignore:
        return
    value = _value(attr_el, f"{where}, attr {name!r}")
    if name in schema.categorical:
        table = schema.categorical[name]
        key = value if isinstance(value, str) else repr(value)
        if key not in table:
            raise ParseError(f"unknown category {value!r} for {name!r}", where)
        vec[table[key]] = 1.0
        return
    if name not in numeric:
        raise ParseError(f"unknown attribute {name!r}", where)
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ParseError(f"string attribute {name!r} needs a categorical mapping", where) from None
    vec[numeric[name]] = value


def parse_gxl(data, schema=LETTER_SCHEMA, source="<gxl>"):
    """Parse one GXL document (bytes or str) into an :class:`AttributedGraph`."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}", source) from None
    graphs = root.findall("graph") if root.tag != "graph" else [root]
    if len(graphs) != 1:
        raise ParseError(f"expected one <graph>, found {len(graphs)}", source)
    graph = graphs[0]
    directed = graph.get("edgemode", "undirected") == "directed"
    nodes = graph.findall("node")
    if not nodes:
        raise ParseError("graph has no nodes", source)
    index = {}
    m = len(nodes)
    a = np.zeros((m, m, schema.attr_dim))
    for i, node in enumerate(nodes):
        nid = node.get("id")
        where = f"{source}: node #{i} (id={nid!r})"
        if nid is None or nid in index:
            raise ParseError("missing or duplicate node id", where)
        index[nid] = i
        for attr in node.findall("attr"):
            _fill(a[i, i], attr, schema.node, schema, where)
    for e, edge in enumerate(graph.findall("edge")):
        src, dst = edge.get("from"), edge.get("to")
        where = f"{source}: edge #{e} ({src!r} -> {dst!r})"
        if src not in index or dst not in index:
            raise ParseError("edge references an unknown node", where)
        i, j = index[src], index[dst]
        if i == j:
            raise ParseError("self loops are not supported", where)
        vec = np.zeros(schema.attr_dim)
        for attr in edge.findall("attr"):
            _fill(vec, attr, schema.edge, schema, where)
        if schema.edge_indicator is not None:
            vec[schema.edge_indicator] = schema.edge_value
        if not np.any(vec):
            raise ParseError("edge has an all-zero attribute vector (set edge_indicator)", where)
        targets = [(i, j)] if directed else [(i, j), (j, i)]
        for p, q in targets:
            if np.any(a[p, q]) and not np.array_equal(a[p, q], vec):
                raise ParseError("conflicting duplicate edge", where)
            a[p, q] = vec
    if not np.all(np.isfinite(a)):
        raise ParseError("non-finite attribute", source)
    return AttributedGraph(a, directed=directed)


def write_gxl(g, graph_id="g", node_names=("x", "y"), precision=None):
    """Serialise a graph to GXL using attribute names for the first dimensions.

    Only node dimensions listed in ``node_names`` are written; edges are written
    unlabelled. Intended for fixtures that are read back with a matching schema.
    """
    fmt = repr if precision is None else (lambda v: f"{v:.{precision}g}")
    mode = "directed" if g.directed else "undirected"
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', "<gxl>", f'<graph id="{graph_id}" edgeids="false" edgemode="{mode}">']
    for i in range(g.order):
        attrs = "".join(
            f'<attr name="{name}"><float>{fmt(float(g.attrs[i, i, d]))}</float></attr>' for d, name in enumerate(node_names)
        )
        lines.append(f'<node id="_{i}">{attrs}</node>')
    for i in range(g.order):
        for j in range(g.order):
            if i != j and (g.directed or i < j) and np.any(g.attrs[i, j]):
                lines.append(f'<edge from="_{i}" to="_{j}"/>')
    lines += ["</graph>", "</gxl>", ""]
    return "\n".join(lines).encode("utf-8")


def parse_cxl(data, source="<cxl>"):
    """List of ``(filename, class)`` pairs from a CXL index."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}", source) from None
    entries = [(p.get("file"), p.get("class")) for p in root.iter("print")]
    if any(f is None for f, _ in entries):
        raise ParseError("<print> without file attribute", source)
    return entries


def write_cxl(entries):
    lines = ['<?xml version="1.0"?>', "<GraphCollection>", "<fingerprints>"]
    lines += [f'<print file="{f}" class="{c}"/>' for f, c in entries]
    lines += ["</fingerprints>", "</GraphCollection>", ""]
    return "\n".join(lines).encode("utf-8")


def load_dataset(directory, index_files, schema=LETTER_SCHEMA, name=None):
    """Load GXL graphs listed in one or more CXL index files.

    ``index_files`` is a file name or a mapping ``{split: file name}``; names are
    relative to ``directory``.
    """
    if isinstance(index_files, (str, os.PathLike)):
        index_files = {None: index_files}
    graphs, labels, splits = [], [], {}
    for split, fname in index_files.items():
        path = os.path.join(directory, fname)
        if not os.path.exists(path):
            raise ParseError("index file not found", path)
        with open(path, "rb") as fh:
            entries = parse_cxl(fh.read(), path)
        if not entries:
            raise ParseError("index lists no graphs", path)
        start = len(graphs)
        for f, c in entries:
            gpath = os.path.join(directory, f)
            if not os.path.exists(gpath):
                raise ParseError("graph file not found", gpath)
            with open(gpath, "rb") as fh:
                graphs.append(parse_gxl(fh.read(), schema, gpath))
            labels.append(c)
        if split is not None:
            splits[split] = list(range(start, len(graphs)))
    return Dataset(
        name or os.path.basename(os.path.normpath(directory)),
        Sample(graphs, labels),
        splits or None,
        f"gxl:{os.path.abspath(directory)}",
    )


# ------------------------------------------------------------------ native JSON


def _graph_obj(g):
    return {"order": g.order, "attr_dim": g.attr_dim, "directed": g.directed, "attrs": g.attrs.tolist()}


def _dumps(obj):
    try:
        return (json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")
    except ValueError as exc:
        raise InvalidArgumentError(f"cannot serialise: {exc}") from None


def native_serialize(x):
    if isinstance(x, AttributedGraph):
        return _dumps({"format": FORMAT_VERSION, "kind": "graph", **_graph_obj(x)})
    if isinstance(x, Dataset):
        return _dumps(
            {
                "format": FORMAT_VERSION,
                "kind": "dataset",
                "name": x.name,
                "provenance": x.provenance,
                "labels": None if x.labels is None else list(x.labels),
                "splits": None if x.splits is None else {k: list(v) for k, v in x.splits.items()},
                "graphs": [_graph_obj(g) for g in x.graphs],
            }
        )
    raise InvalidArgumentError(f"cannot serialise {type(x).__name__}")


def _graph_from(obj, where):
    try:
        order, dim, attrs = int(obj["order"]), int(obj["attr_dim"]), obj["attrs"]
        a = np.array(attrs, dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad graph record: {exc}", where) from None
    if a.shape != (order, order, dim):
        raise ParseError(f"attrs shape {a.shape} does not match order/attr_dim", where)
    try:
        return AttributedGraph(a, directed=bool(obj.get("directed", False)))
    except InvalidArgumentError as exc:
        raise ParseError(str(exc), where) from None


def native_parse(data, source="<native>"):
    """Inverse of :func:`native_serialize`; returns a graph or a :class:`Dataset`."""
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}", source) from None
    if not isinstance(obj, dict) or obj.get("kind") not in ("graph", "dataset"):
        raise ParseError("expected an object with kind 'graph' or 'dataset'", source)
    if obj["kind"] == "graph":
        return _graph_from(obj, source)
    graphs = [_graph_from(g, f"{source}: graph #{i}") for i, g in enumerate(obj.get("graphs", []))]
    if not graphs:
        raise ParseError("dataset without graphs", source)
    try:
        return Dataset(obj.get("name", ""), Sample(graphs, obj.get("labels")), obj.get("splits"), obj.get("provenance", ""))
    except InvalidArgumentError as exc:
        raise ParseError(str(exc), source) from None


def read_native(path):
    with open(path, "rb") as fh:
        return native_parse(fh.read(), str(path))


def write_native(path, x):
    with open(path, "wb") as fh:
        fh.write(native_serialize(x))


# ------------------------------------------------------------------- generators

# Stroke drawings of capital letters on a 4 x 4 grid: node coordinates and edges.
LETTERS = {
    "A": ([(0, 0), (1, 2), (2, 4), (3, 2), (4, 0)], [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]),
    "E": ([(4, 4), (0, 4), (0, 2), (3, 2), (0, 0), (4, 0)], [(0, 1), (1, 2), (2, 3), (2, 4), (4, 5)]),
    "F": ([(4, 4), (0, 4), (0, 2), (3, 2), (0, 0)], [(0, 1), (1, 2), (2, 3), (2, 4)]),
    "H": ([(0, 4), (0, 2), (0, 0), (4, 4), (4, 2), (4, 0)], [(0, 1), (1, 2), (3, 4), (4, 5), (1, 4)]),
    "K": ([(0, 4), (0, 2), (0, 0), (4, 4), (4, 0)], [(0, 1), (1, 2), (1, 3), (1, 4)]),
    "L": ([(0, 4), (0, 0), (3, 0)], [(0, 1), (1, 2)]),
    "M": ([(0, 0), (0, 4), (2, 2), (4, 4), (4, 0)], [(0, 1), (1, 2), (2, 3), (3, 4)]),
    "N": ([(0, 0), (0, 4), (4, 0), (4, 4)], [(0, 1), (1, 2), (2, 3)]),
    "T": ([(0, 4), (2, 4), (4, 4), (2, 0)], [(0, 1), (1, 2), (1, 3)]),
    "V": ([(0, 4), (2, 0), (4, 4)], [(0, 1), (1, 2)]),
    "X": ([(0, 4), (4, 0), (2, 2), (0, 0), (4, 4)], [(0, 2), (2, 1), (3, 2), (2, 4)]),
    "Y": ([(0, 4), (4, 4), (2, 2), (2, 0)], [(0, 2), (1, 2), (2, 3)]),
    "Z": ([(0, 4), (4, 4), (0, 0), (4, 0)], [(0, 1), (1, 2), (2, 3)]),
}


def letter_prototype(letter, unit=0.25):
    """Prototype graph of a letter: node ``(x, y, 0)``, edge ``(0, 0, 1)``."""
    coords, edges = LETTERS[letter]
    nodes = [(x * unit, y * unit, 0.0) for x, y in coords]
    return AttributedGraph.from_parts(nodes, [(i, j, (0.0, 0.0, 1.0)) for i, j in edges])


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for :func:`generate`.

    ``letter-like``: ``count`` noisy copies of each prototype. ``prototype`` is one
    graph or a sequence whose items are graphs or built-in letter names (a name
    also serves as its default label); when omitted the built-in letters
    ``A E F H K L M N T V X Y Z`` are used. ``random-uniform``: ``count`` random graphs.
    """

    family: str = "letter-like"
    prototype: AttributedGraph | tuple | None = None
    labels: tuple | None = None
    noise_sigma: float = 0.1
    structural_noise: float = 0.0
    count: int = 10
    seed: int = 0
    order_range: tuple = (3, 6)
    density: float = 0.5
    attr_dim: int = 2
    name: str | None = None

    def __post_init__(self):
        if self.family not in ("letter-like", "random-uniform"):
            raise InvalidArgumentError(f"unknown family {self.family!r}")
        if self.count < 1:
            raise InvalidArgumentError("count must be >= 1")
        if self.noise_sigma < 0 or not 0 <= self.structural_noise <= 1:
            raise InvalidArgumentError("noise parameters out of range")
        lo, hi = self.order_range
        if not 1 <= lo <= hi:
            raise InvalidArgumentError("bad order_range")
        if not 0 <= self.density <= 1 or self.attr_dim < 1:
            raise InvalidArgumentError("bad density or attr_dim")
        if self.labels is not None and len(self.labels) != len(self.prototypes()):
            raise InvalidArgumentError("one label per prototype")

    def prototypes(self):
        if self.prototype is None:
            return [letter_prototype(c) for c in sorted(LETTERS)]
        if isinstance(self.prototype, AttributedGraph):
            return [self.prototype]
        return [letter_prototype(p) if isinstance(p, str) else p for p in self.prototype]


def distort(proto, sigma, structural, rng):
    """Gaussian attribute noise on nodes and edges plus random edge toggles.

    A toggled-on edge has no prototype attribute, so its attribute is pure noise.
    """
    m, d = proto.order, proto.attr_dim
    a = np.array(proto.attrs)
    mask = np.any(a != 0, axis=2)
    np.fill_diagonal(mask, False)
    out = np.zeros_like(a)
    for i in range(m):
        out[i, i] = [a[i, i, t] + rng.normal(0.0, sigma) for t in range(d)] if sigma > 0 else a[i, i]
    pairs = [(i, j) for i in range(m) for j in range(m) if i != j and (proto.directed or i < j)]
    for i, j in pairs:
        present = bool(mask[i, j])
        if structural > 0 and rng.random() < structural:
            present = not present
        if present:
            base = a[i, j]
            vec = np.array([base[t] + rng.normal(0.0, sigma) for t in range(d)]) if sigma > 0 else base.copy()
            out[i, j] = vec
            if not proto.directed:
                out[j, i] = vec
    return AttributedGraph(out, directed=proto.directed)


def random_graph(rng, order_range=(3, 6), density=0.5, attr_dim=2):
    lo, hi = order_range
    m = rng.integers(lo, hi + 1)
    a = np.zeros((m, m, attr_dim))
    for i in range(m):
        a[i, i] = [rng.random() for _ in range(attr_dim)]
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < density:
                vec = [rng.random() for _ in range(attr_dim)]
                a[i, j] = vec
                a[j, i] = vec
    return AttributedGraph(a)


def generate(spec):
    rng = SplitMix64(derive_seed(spec.seed, "generate", spec.family))
    if spec.family == "random-uniform":
        graphs = [random_graph(rng, spec.order_range, spec.density, spec.attr_dim) for _ in range(spec.count)]
        return Dataset(spec.name or "random-uniform", Sample(graphs), None, f"generate:random-uniform:{spec.seed}")
    protos = spec.prototypes()
    if spec.labels is not None:
        labels = list(spec.labels)
    elif spec.prototype is None:
        labels = sorted(LETTERS)
    elif isinstance(spec.prototype, AttributedGraph):
        labels = ["0"]
    else:
        labels = [p if isinstance(p, str) else str(i) for i, p in enumerate(spec.prototype)]
    graphs, glabels = [], []
    for proto, lab in zip(protos, labels):
        for _ in range(spec.count):
            graphs.append(distort(proto, spec.noise_sigma, spec.structural_noise, rng))
            glabels.append(lab)
    return Dataset(spec.name or "letter-like", Sample(graphs, glabels), None, f"generate:letter-like:{spec.seed}")


# ----------------------------------------------------------------- normalisation


@dataclass(frozen=True)
class Normalization:
    node_mean: np.ndarray
    node_std: np.ndarray
    edge_mean: np.ndarray
    edge_std: np.ndarray

    def _map(self, g, fn_node, fn_edge):
        a = np.array(g.attrs)
        m = g.order
        edges = np.any(a != 0, axis=2)
        np.fill_diagonal(edges, False)
        idx = np.arange(m)
        a[idx, idx] = fn_node(a[idx, idx])
        a[edges] = fn_edge(a[edges])
        return AttributedGraph(a, directed=g.directed)

    def apply(self, g):
        return self._map(g, lambda v: (v - self.node_mean) / self.node_std, lambda v: (v - self.edge_mean) / self.edge_std)

    def invert(self, g):
        return self._map(g, lambda v: v * self.node_std + self.node_mean, lambda v: v * self.edge_std + self.edge_mean)


def _moments(rows, d):
    if len(rows) == 0:
        return np.zeros(d), np.ones(d)
    rows = np.asarray(rows)
    mean = rows.mean(axis=0)
    std = rows.std(axis=0)
    std[std == 0] = 1.0
    return mean, std


def normalize_attributes(dataset):
    """Z-score node attributes over all nodes and edge attributes over all edges.

    Non-edges are excluded from the edge statistics and stay zero. Dimensions with
    zero variance keep a standard deviation of one. Returns the normalised dataset
    and the :class:`Normalization` so the same transform can be applied to test data.
    """
    d = dataset.sample.attr_dim
    node_rows, edge_rows = [], []
    for g in dataset.graphs:
        idx = np.arange(g.order)
        node_rows.extend(g.attrs[idx, idx])
        edges = np.any(g.attrs != 0, axis=2)
        np.fill_diagonal(edges, False)
        edge_rows.extend(g.attrs[edges])
    nm, ns = _moments(node_rows, d)
    em, es = _moments(edge_rows, d)
    tf = Normalization(nm, ns, em, es)
    graphs = [tf.apply(g) for g in dataset.graphs]
    out = Dataset(dataset.name, Sample(graphs, dataset.labels), dataset.splits, dataset.provenance)
    return out, tf
