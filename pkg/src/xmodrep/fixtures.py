"""TOML fixtures describing 2-crossed modules, and the bundled corpus.

A fixture has one table per group (``[L]``, ``[M]``, ``[N]``), one per
structure map (``[d2]``, ``[d1]``), one per action (``[act_nm]``,
``[act_nl]``), a ``[lifting]`` table and a ``[meta]`` table.  Elements are
always referred to by name; see ``data/*.toml`` for every supported form.
"""

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
import re

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:                 # Python < 3.11
    import tomli as tomllib

from .groups import FiniteGroup, GroupAction, GroupError, GroupHom, direct_product, extend_hom
from .xmod2 import TwoCrossedModule, search_peiffer_liftings

GROUPS = ("L", "M", "N")


class FixtureError(ValueError):
    """Bad fixture input; carries a location when one is known."""

    def __init__(self, message, path="", line=None, column=None):
        self.path, self.line, self.column = path, line, column
        where = path
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}" if where else message)


@dataclass
class FixtureSpec:
    name: str
    module: TwoCrossedModule
    meta: dict = field(default_factory=dict)
    source: str = ""

    @property
    def expect_pass(self):
        return self.meta.get("expect", "pass") == "pass"

    @property
    def expected_failures(self):
        return tuple(self.meta.get("expect_failures", ()))

    @property
    def l_trivial(self):
        return self.module.L.order == 1

    @property
    def field(self):
        return self.meta.get("field", "rational")


# ---------------------------------------------------------------------------
# locating keys for semantic errors

def _locate(text, section, key=None):
    """(line, column) of ``key`` inside ``[section]``, or of the header itself."""
    if not text:
        return None, None
    lines = text.splitlines()
    head = re.compile(r"^\s*\[\s*" + re.escape(section) + r"\s*\]")
    for i, line in enumerate(lines):
        if head.match(line):
            if key is None:
                return i + 1, line.index("[") + 1
            pat = re.compile(r"^\s*" + re.escape(key) + r"\s*=")
            for j in range(i + 1, len(lines)):
                if lines[j].lstrip().startswith("["):
                    break
                if pat.match(lines[j]):
                    return j + 1, len(lines[j]) - len(lines[j].lstrip()) + 1
            return i + 1, line.index("[") + 1
    return None, None


class _Ctx:
    def __init__(self, path, text):
        self.path, self.text = path, text

    def fail(self, msg, section, key=None):
        line, col = _locate(self.text, section, key)
        label = section if key is None else f"{section}.{key}"
        raise FixtureError(f"[{label}] {msg}", self.path, line, col)


# ---------------------------------------------------------------------------
# groups, maps, actions

def _group(block, ctx, section):
    if not isinstance(block, dict):
        ctx.fail("group block must be a table", section)
    kinds = [k for k in ("trivial", "cyclic", "perm", "table", "product") if k in block]
    if len(kinds) != 1:
        ctx.fail("give exactly one of trivial, cyclic, perm, table, product", section)
    kind = kinds[0]
    label = block.get("label", "")
    try:
        if kind == "trivial":
            return FiniteGroup.trivial(label=label or "1")
        if kind == "cyclic":
            n = block["cyclic"]
            if not isinstance(n, int) or n < 1:
                ctx.fail("cyclic order must be a positive integer", section, "cyclic")
            return FiniteGroup.cyclic(n, label=label or None)
        if kind == "perm":
            if "degree" not in block:
                ctx.fail("permutation groups need a degree", section)
            return FiniteGroup.from_perm_gens(block["perm"], block["degree"], label=label)
        if kind == "table":
            rows = block["table"]
            if not isinstance(rows, list) or not rows:
                ctx.fail("table must be a non-empty list of rows", section, "table")
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != len(rows):
                    got = len(row) if isinstance(row, list) else "no"
                    ctx.fail(f"row {i} has length {got}, expected {len(rows)}", section, "table")
            names = block.get("names")
            if names is not None:
                lookup = {str(x): i for i, x in enumerate(names)}
                try:
                    rows = [[lookup[str(x)] if not isinstance(x, int) else x for x in r] for r in rows]
                except KeyError as e:
                    ctx.fail(f"unknown element {e.args[0]!r}", section, "table")
            return FiniteGroup.from_table(rows, names=names, label=label)
        parts = block["product"]
        if not isinstance(parts, list) or len(parts) != 2:
            ctx.fail("product takes exactly two group blocks", section, "product")
        A = _group(parts[0], ctx, section)
        B = _group(parts[1], ctx, section)
        return direct_product(A, B, label=label)
    except GroupError as e:
        ctx.fail(str(e), section, kind)


def _element(G, name, ctx, section, key):
    try:
        return G.index_of(str(name))
    except (KeyError, ValueError, GroupError):
        ctx.fail(f"{name!r} is not an element of {G.label or 'the group'}", section, key)


def _hom(block, src, tgt, ctx, section):
    block = block or {"kind": "trivial"}
    try:
        if "kind" in block:
            if block["kind"] == "trivial":
                return GroupHom.trivial(src, tgt)
            if block["kind"] == "identity":
                if src.order != tgt.order or not np.array_equal(src.mul, tgt.mul):
                    ctx.fail("identity needs the same group on both sides", section, "kind")
                return GroupHom(src, tgt, np.arange(src.order))
            ctx.fail(f"unknown map kind {block['kind']!r}", section, "kind")
        if "images" in block:
            imgs = {_element(src, k, ctx, section, "images"): _element(tgt, v, ctx, section, "images")
                    for k, v in block["images"].items()}
            return GroupHom(src, tgt, extend_hom(src, tgt, imgs))
        if "table" in block:
            t = block["table"]
            if len(t) != src.order:
                ctx.fail(f"expected {src.order} images, got {len(t)}", section, "table")
            hom = GroupHom(src, tgt, np.array([_element(tgt, x, ctx, section, "table") for x in t]))
            return hom
    except GroupError as e:
        ctx.fail(str(e), section)
    ctx.fail("give kind, images or table", section)


def _action(block, actor, acted, ctx, section, maps):
    block = block or {"kind": "trivial"}
    try:
        if "kind" in block:
            kind = block["kind"]
            if kind == "trivial":
                return GroupAction.trivial(actor, acted)
            if kind == "conjugation":
                via = block.get("via")
                if via not in maps:
                    ctx.fail("conjugation needs via = an injective map into the actor", section, "via")
                return GroupAction.conjugation(actor, acted, maps[via])
            ctx.fail(f"unknown action kind {kind!r}", section, "kind")
        if "automorphisms" in block:
            autos = {}
            for g, imgs in block["automorphisms"].items():
                gi = _element(actor, g, ctx, section, "automorphisms")
                pairs = {_element(acted, k, ctx, section, "automorphisms"):
                         _element(acted, v, ctx, section, "automorphisms") for k, v in imgs.items()}
                autos[gi] = extend_hom(acted, acted, pairs) if pairs else np.arange(acted.order)
            return GroupAction.from_generator_automorphisms(actor, acted, autos)
        if "table" in block:
            rows = block["table"]
            if len(rows) != actor.order or any(len(r) != acted.order for r in rows):
                ctx.fail(f"action table must be {actor.order}×{acted.order}", section, "table")
            return GroupAction(actor, acted, np.array(
                [[_element(acted, x, ctx, section, "table") for x in r] for r in rows]))
    except GroupError as e:
        ctx.fail(str(e), section)
    ctx.fail("give kind, automorphisms or table", section)


def _lifting(block, L, M, N, d2, d1, act_nm, act_nl, ctx):
    block = block or {"kind": "trivial"}
    table = np.full((M.order, M.order), L.identity, dtype=np.int64)
    kind = block.get("kind", "entries" if "entries" in block else None)
    if kind == "trivial":
        return table
    if kind == "search":
        idx = block.get("index", 0)
        found = search_peiffer_liftings(L, M, N, d2, d1, act_nm, act_nl, limit=idx + 1)
        if len(found) <= idx:
            ctx.fail(f"search found {len(found)} liftings, index {idx} requested", "lifting", "index")
        return np.array(found[idx].lifting)
    if kind == "entries":
        for k, e in enumerate(block.get("entries", [])):
            if not isinstance(e, list) or len(e) != 3:
                ctx.fail(f"entry {k} must be [m, m′, value]", "lifting", "entries")
            a = _element(M, e[0], ctx, "lifting", "entries")
            b = _element(M, e[1], ctx, "lifting", "entries")
            table[a, b] = _element(L, e[2], ctx, "lifting", "entries")
        return table
    ctx.fail("give kind = trivial | search, or entries", "lifting")


# ---------------------------------------------------------------------------

def parse_fixture_text(text, path="<string>"):
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        m = re.search(r"line (\d+), column (\d+)", str(e))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise FixtureError(f"syntax error: {e}", path, line, col) from None
    ctx = _Ctx(path, text)
    meta = dict(doc.get("meta", {}))
    name = meta.get("name") or Path(path).stem
    for g in GROUPS:
        if g not in doc:
            raise FixtureError(f"missing group table [{g}]", path)
    L, M, N = (_group(doc[g], ctx, g) for g in GROUPS)
    d2 = _hom(doc.get("d2"), L, M, ctx, "d2")
    d1 = _hom(doc.get("d1"), M, N, ctx, "d1")
    maps = {"d2": d2, "d1": d1}
    act_nm = _action(doc.get("act_nm"), N, M, ctx, "act_nm", maps)
    act_nl = _action(doc.get("act_nl"), N, L, ctx, "act_nl", maps)
    lift = _lifting(doc.get("lifting"), L, M, N, d2, d1, act_nm, act_nl, ctx)
    try:
        X = TwoCrossedModule(L, M, N, d2, d1, act_nm, act_nl, lift, label=name)
    except GroupError as e:
        raise FixtureError(str(e), path) from None
    if meta.get("expect", "pass") not in ("pass", "fail"):
        ctx.fail("expect must be 'pass' or 'fail'", "meta", "expect")
    return FixtureSpec(name, X, meta, path)


def parse_fixture(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FixtureError(f"cannot read fixture: {e.strerror}", str(path)) from None
    return parse_fixture_text(text, str(path))


def _data_dir():
    return resources.files("xmodrep") / "data"


def bundled_names():
    return sorted(p.name[:-5] for p in _data_dir().iterdir() if p.name.endswith(".toml"))


def load_bundled(name):
    res = _data_dir() / f"{name}.toml"
    if not res.is_file():
        raise FixtureError(f"no bundled fixture named {name!r}")
    return parse_fixture_text(res.read_text(encoding="utf-8"), f"{name}.toml")


def resolve(name_or_path):
    """A bundled fixture name or a path to a TOML file."""
    p = Path(name_or_path)
    if p.suffix == ".toml" or p.exists():
        return parse_fixture(p)
    return load_bundled(name_or_path)


def bundled_corpus():
    return [load_bundled(n) for n in bundled_names()]
