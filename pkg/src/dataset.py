"""
Network ingestion: the BIF subset, the parameterized JSON format, and
auto-detection of the vendored network files.
"""
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from . import coeffring as cr
from . import config
from .bayesnet import Network, build_network
from .errors import BifSyntaxError, InputError, MissingCptRow, ValueOutOfDomain

BIF_GRAMMAR = r"""
    start: block*
    ?block: network | variable | probability

    network: "network" name "{" PROPERTY* "}"
    variable: "variable" name "{" (vtype | PROPERTY)* "}"
    vtype: "type" "discrete" "[" INT "]" "{" names "}" ";"

    probability: "probability" "(" name parents? ")" "{" (entry | PROPERTY)* "}"
    parents: "|" name ("," name)*
    entry: "table" numbers ";"          -> table
         | "(" names ")" numbers ";"    -> row
         | "default" numbers ";"        -> default

    names: name ("," name)*
    numbers: NUMBER ("," NUMBER)*
    name: NAME | ESCAPED_STRING

    PROPERTY: /property\b[^;]*;/
    NAME: /[A-Za-z0-9_][A-Za-z0-9_.\-]*/
    NUMBER: /[+-]?(\d+\/\d+|(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)/
    LINE_COMMENT: /\/\/[^\n]*/
    BLOCK_COMMENT: /\/\*(.|\n)*?\*\//

    %import common.INT
    %import common.ESCAPED_STRING
    %import common.WS
    %ignore WS
    %ignore LINE_COMMENT
    %ignore BLOCK_COMMENT
"""

_bif_parser = Lark(BIF_GRAMMAR, parser="earley")


class _BifBuilder(Transformer):
    """Turns the parse tree into plain declarations."""

    def start(self, items):
        return items

    def name(self, items):
        tok = items[0]
        return str(tok)[1:-1] if tok.type == "ESCAPED_STRING" else str(tok)

    def names(self, items):
        return list(items)

    def numbers(self, items):
        return [(Fraction(str(t)), t) for t in items]

    def network(self, items):
        return ("network", items[0])

    def vtype(self, items):
        count, values = items
        if int(count) != len(values):
            raise BifSyntaxError(
                f"declared {count} values but listed {len(values)}", count.line, count.column
            )
        return values

    def variable(self, items):
        decls = [i for i in items[1:] if isinstance(i, list)]
        if len(decls) != 1:
            raise BifSyntaxError(f"variable {items[0]} needs exactly one discrete type")
        return ("variable", items[0], decls[0])

    def parents(self, items):
        return ("parents", list(items))

    def table(self, items):
        return ("table", None, items[0])

    def row(self, items):
        return ("row", tuple(items[0]), items[1])

    def default(self, items):
        return ("default", None, items[0])

    def probability(self, items):
        node = items[0]
        parents: List[str] = []
        entries = []
        for item in items[1:]:
            if isinstance(item, Token):
                continue
            if item[0] == "parents":
                parents = item[1]
            else:
                entries.append(item)
        return ("probability", node, parents, entries)


def parse_bif(text: str, normalize: bool = False, name: Optional[str] = None) -> Network:
    """Parse the BIF subset into a validated network without inputs.

    ``name`` overrides the name declared in the file.
    """
    try:
        decls = _BifBuilder().transform(_bif_parser.parse(text))
    except UnexpectedInput as exc:
        token = getattr(exc, "token", None) or getattr(exc, "char", None)
        raise BifSyntaxError(
            f"unexpected input {str(token)!r}" if token else "unexpected end of input",
            exc.line,
            exc.column,
        ) from None
    except VisitError as exc:
        raise exc.orig_exc from None

    labels: Dict[str, Tuple[str, ...]] = {}
    tables = {}
    declared = "network"
    for decl in decls:
        if decl[0] == "network":
            declared = decl[1]
        elif decl[0] == "variable":
            labels[decl[1]] = tuple(decl[2])
        elif decl[0] == "probability":
            tables[decl[1]] = (decl[2], decl[3])

    nodes = list(labels)
    domains = {v: list(range(len(labels[v]))) for v in nodes}
    dep: Dict[str, List[str]] = {}
    cpt = {}
    for v in nodes:
        if v not in tables:
            raise MissingCptRow(v, ())
        parents, entries = tables[v]
        for u in parents:
            if u not in labels:
                raise InputError(f"probability block of {v} names unknown parent {u}")
        dep[v] = parents
        cpt[v] = _rows_of(v, parents, entries, labels)
    for v in tables:
        if v not in labels:
            raise InputError(f"probability block for undeclared variable {v}")
    name = name or declared

    print(f"[DATA] Parsed BIF network {name}: {len(nodes)} nodes", file=sys.stderr)
    return build_network(
        nodes, domains, dep, cpt, labels=labels, name=name, normalize=normalize
    )


def _rows_of(v: str, parents: Sequence[str], entries, labels) -> Dict[tuple, Dict[int, Fraction]]:
    size = len(labels[v])
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    default = None
    for kind, given, numbers in entries:
        if len(numbers) != size:
            tok = numbers[0][1]
            raise BifSyntaxError(
                f"{v} has {size} values but the entry lists {len(numbers)} probabilities",
                tok.line,
                tok.column,
            )
        dist = {i: p for i, (p, _) in enumerate(numbers)}
        if kind == "table":
            if parents:
                tok = numbers[0][1]
                raise BifSyntaxError(f"table form needs a node without parents ({v})", tok.line, tok.column)
            rows[()] = dist
        elif kind == "default":
            default = dist
        else:
            if len(given) != len(parents):
                tok = numbers[0][1]
                raise BifSyntaxError(f"row {given} of {v} does not match parents {parents}", tok.line, tok.column)
            key = []
            for u, label in zip(parents, given):
                if label not in labels[u]:
                    raise ValueOutOfDomain(u, label, labels[u])
                key.append(labels[u].index(label))
            rows[tuple(key)] = dist
    if default is not None:
        for key in itertools.product(*(range(len(labels[u])) for u in parents)):
            rows.setdefault(key, dict(default))
    return rows


def _bif_number(p: Fraction) -> str:
    text = cr.to_exact(p)
    return text if "." in text or "/" in text else text + ".0"


def render_bif(net: Network) -> str:
    """BIF text for a parameter-free network without inputs."""
    if net.inputs:
        raise InputError("only networks without inputs can be written as BIF")
    lines = [f"network {net.name} {{", "}"]
    for v in net.nodes:
        names = [net.label(v, x) for x in net.domains[v]]
        lines.append(f"variable {v} {{")
        lines.append(f"  type discrete [ {len(names)} ] {{ {', '.join(names)} }};")
        lines.append("}")
    for v in net.nodes:
        parents = net.dep[v]
        head = f"probability ( {v} | {', '.join(parents)} ) {{" if parents else f"probability ( {v} ) {{"
        lines.append(head)
        for row, dist in net.cpt[v].items():
            probs = []
            for p in dist.values():
                if cr.is_parametric(p):
                    raise InputError("parameterized networks cannot be written as BIF")
                probs.append(_bif_number(p))
            if parents:
                given = ", ".join(net.label(u, x) for u, x in zip(parents, row))
                lines.append(f"  ({given}) {', '.join(probs)};")
            else:
                lines.append(f"  table {', '.join(probs)};")
        lines.append("}")
    return "\n".join(lines) + "\n"


def load_param_network(text: str, normalize: bool = False, name: str = "network") -> Network:
    """Parse the JSON network format whose CPT entries may mention parameters."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BifSyntaxError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None

    params = [str(p) for p in doc.get("parameters", [])]
    name = doc.get("name", name)
    nodes: List[str] = []
    domains: Dict[str, list] = {}
    labels: Dict[str, Tuple[str, ...]] = {}
    for var in doc.get("variables", []):
        v = str(var["name"])
        values = list(var["values"])
        nodes.append(v)
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in values):
            domains[v] = [Fraction(str(x)) for x in values]
        else:
            labels[v] = tuple(str(x) for x in values)
            domains[v] = list(range(len(values)))

    def resolve(var: str, raw):
        if var not in domains:
            raise InputError(f"unknown variable {var} in CPT")
        if var in labels:
            if str(raw) not in labels[var]:
                raise ValueOutOfDomain(var, raw, labels[var])
            return labels[var].index(str(raw))
        value = Fraction(str(raw))
        if value not in domains[var]:
            raise ValueOutOfDomain(var, raw, domains[var])
        return value

    dep: Dict[str, List[str]] = {}
    cpt = {}
    for block in doc.get("cpt", []):
        v = str(block["node"])
        parents = [str(u) for u in block.get("parents", [])]
        if v not in domains:
            raise InputError(f"CPT for undeclared variable {v}")
        rows = {}
        for row in block.get("rows", []):
            given = tuple(resolve(u, x) for u, x in zip(parents, row.get("given", [])))
            if len(given) != len(parents):
                raise InputError(f"row {row.get('given')} of {v} does not match parents {parents}")
            dist = row["dist"]
            if len(dist) != len(domains[v]):
                raise InputError(f"{v} has {len(domains[v])} values but a row lists {len(dist)}")
            values = domains[v] if v not in labels else range(len(labels[v]))
            rows[given] = {x: cr.parse_poly(str(p), params) for x, p in zip(values, dist)}
        dep[v] = parents
        cpt[v] = rows
    for v in nodes:
        if v not in cpt:
            raise MissingCptRow(v, ())

    print(f"[DATA] Parsed JSON network {name}: {len(nodes)} nodes, parameters {params}", file=sys.stderr)
    return build_network(
        nodes, domains, dep, cpt, labels=labels, params=params, name=name, normalize=normalize
    )


def load_all_network_files(directory: Optional[Path] = None) -> List[Path]:
    """Auto-detect network files in the networks directory."""
    directory = directory or config.NETWORKS_DIR
    files = []
    for pattern in config.NETWORK_PATTERNS:
        files.extend(directory.glob(pattern))
    return sorted(set(files))


def load_network(file_path, normalize: bool = False) -> Network:
    """Load a ``.bif`` or ``.json`` network by extension."""
    path = Path(file_path)
    if not path.exists():
        raise FileNotFoundError(f"Network file not found: {path}")
    print(f"[DATA] Loading: {path.name}", file=sys.stderr)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return load_param_network(text, normalize=normalize, name=path.stem)
    return parse_bif(text, normalize=normalize, name=path.stem)
