"""KEEL ".dat" file ingestion and results persistence.

The reader accepts the KEEL header grammar (@relation, @attribute,
@inputs, @outputs, @data) with case-insensitive keywords, followed by
comma-separated rows.  Fold discovery pairs the pre-split 5-fold files
"<name>-5-<i>tra.dat" / "<name>-5-<i>tst.dat".  Missing values ("?") are
rejected: the supported datasets have none and silent imputation would
contaminate results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

from .dataset import (
    CATEGORICAL,
    CLASS,
    NUMERIC,
    Column,
    Dataset,
    FoldPair,
    RawTable,
    clean_strings,
    one_hot_encode,
    resolve_positive_name,
)

__all__ = [
    "KeelParseError",
    "KeelHeader",
    "AttributeDecl",
    "ResultRecord",
    "parse_keel",
    "format_keel",
    "load_fold_pair",
    "load_fold_pairs",
    "write_results_csv",
    "read_results_csv",
]

N_FOLDS = 5


class KeelParseError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeDecl:
    """One @attribute line: a numeric range or a categorical value set."""

    name: str
    numeric: bool
    values: tuple[str, ...] | None = None  # categorical only
    lo: float | None = None  # declared numeric range, informational
    hi: float | None = None


@dataclass(frozen=True)
class KeelHeader:
    relation: str
    attributes: tuple[AttributeDecl, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    def __post_init__(self):
        declared = {a.name for a in self.attributes}
        for name in (*self.inputs, *self.outputs):
            if name not in declared:
                raise KeelParseError(f"{name!r} in @inputs/@outputs is not a declared attribute")
        if len(self.outputs) != 1:
            raise KeelParseError(f"@outputs must name exactly one attribute, got {self.outputs}")


@dataclass(frozen=True)
class ResultRecord:
    """One observation of the experiment grid."""

    dataset: str
    fold: int
    model: str
    scaler: str
    f1: float
    gmean: float

    def __post_init__(self):
        if not 1 <= self.fold <= N_FOLDS:
            raise ValueError(f"fold must be in 1..{N_FOLDS}, got {self.fold}")
        for label, score in (("f1", self.f1), ("gmean", self.gmean)):
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"{label} must lie in [0, 1], got {score}")

    @property
    def key(self) -> tuple:
        return (self.dataset, self.fold, self.model, self.scaler)


_ATTR_RE = re.compile(
    r"""^(?P<name>[^\s{]+)\s*
        (?:
            (?P<kind>real|integer)\s*(?:\[\s*(?P<lo>[^,\]]+)\s*,\s*(?P<hi>[^,\]]+)\s*\])?
          | \{(?P<values>[^}]*)\}
        )\s*$""",
    re.IGNORECASE | re.VERBOSE,
)


def parse_keel(text: str) -> RawTable:
    """Parse the contents of a KEEL .dat file into a raw table."""
    relation = None
    attributes: list[AttributeDecl] = []
    inputs: tuple[str, ...] | None = None
    outputs: tuple[str, ...] | None = None
    data_rows: list[str] = []
    in_data = False

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if in_data:
            data_rows.append(stripped)
            continue
        if not stripped.startswith("@"):
            raise KeelParseError(f"line {lineno}: expected a header line, got {stripped!r}")
        keyword, _, rest = stripped.partition(" ")
        keyword = keyword.lower()
        rest = rest.strip()
        if keyword == "@relation":
            relation = rest
        elif keyword == "@attribute":
            attributes.append(_parse_attribute(rest, lineno))
        elif keyword == "@inputs":
            inputs = tuple(v.strip() for v in rest.split(",") if v.strip())
        elif keyword == "@outputs":
            outputs = tuple(v.strip() for v in rest.split(",") if v.strip())
        elif keyword == "@data":
            in_data = True
        else:
            raise KeelParseError(f"line {lineno}: unknown header keyword {keyword!r}")

    if relation is None:
        raise KeelParseError("missing @relation line")
    if not attributes:
        raise KeelParseError("missing @attribute declarations")
    if not in_data:
        raise KeelParseError("missing @data section")
    if outputs is None:
        outputs = (attributes[-1].name,)
    if inputs is None:
        inputs = tuple(a.name for a in attributes if a.name not in outputs)
    header = KeelHeader(
        relation=relation, attributes=tuple(attributes), inputs=inputs, outputs=outputs
    )
    return _rows_to_table(header, data_rows)


def _parse_attribute(rest: str, lineno: int) -> AttributeDecl:
    m = _ATTR_RE.match(rest)
    if not m:
        raise KeelParseError(f"line {lineno}: cannot parse attribute declaration {rest!r}")
    name = m.group("name")
    if m.group("kind"):
        lo = float(m.group("lo")) if m.group("lo") is not None else None
        hi = float(m.group("hi")) if m.group("hi") is not None else None
        return AttributeDecl(name=name, numeric=True, lo=lo, hi=hi)
    values = tuple(v.strip() for v in m.group("values").split(",") if v.strip())
    if not values:
        raise KeelParseError(f"line {lineno}: attribute {name!r} declares no values")
    return AttributeDecl(name=name, numeric=False, values=values)


def _rows_to_table(header: KeelHeader, data_rows: list[str]) -> RawTable:
    class_name = header.outputs[0]
    columns = []
    for a in header.attributes:
        if a.name == class_name:
            values = a.values if not a.numeric else ()
            columns.append(Column(name=a.name, kind=CLASS, values=values or ()))
        elif a.numeric:
            columns.append(Column(name=a.name, kind=NUMERIC))
        else:
            columns.append(Column(name=a.name, kind=CATEGORICAL, values=a.values))

    n_cols = len(columns)
    rows = []
    for r, line in enumerate(data_rows):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != n_cols:
            raise KeelParseError(
                f"data row {r}: expected {n_cols} cells, got {len(cells)}"
            )
        parsed = []
        for i, cell in enumerate(cells):
            if cell == "?":
                raise KeelParseError(
                    f"data row {r}: missing value in column {columns[i].name!r} is not supported"
                )
            if columns[i].kind == NUMERIC:
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise KeelParseError(
                        f"data row {r}: cannot parse {cell!r} as a number in column "
                        f"{columns[i].name!r}"
                    ) from None
            else:
                parsed.append(cell)
        rows.append(tuple(parsed))

    # A class column declared numeric gets its value list from the data.
    ci = next(i for i, c in enumerate(columns) if c.kind == CLASS)
    if not columns[ci].values:
        seen = []
        for row in rows:
            v = str(row[ci])
            if v not in seen:
                seen.append(v)
        columns[ci] = replace(columns[ci], values=tuple(seen))
        rows = [tuple(str(c) if i == ci else c for i, c in enumerate(row)) for row in rows]

    return RawTable(name=header.relation, columns=tuple(columns), rows=tuple(rows))


def format_keel(
    table: RawTable,
    inputs: tuple[str, ...] | None = None,
    ranges: dict | None = None,
) -> str:
    """Serialize a raw table back to KEEL .dat text (used by tests and
    fixture tooling).  Numeric ranges are recomputed from the data unless
    `ranges` supplies {column name: (lo, hi)} overrides, which lets fold
    files of one dataset share the full dataset's declared ranges."""
    ci = table.class_column
    lines = [f"@relation {table.name}"]
    for i, col in enumerate(table.columns):
        if col.kind == NUMERIC:
            if ranges and col.name in ranges:
                lo, hi = ranges[col.name]
            else:
                vals = [row[i] for row in table.rows]
                lo = min(vals) if vals else 0.0
                hi = max(vals) if vals else 0.0
            lines.append(f"@attribute {col.name} real [{_fmt_cell(lo)}, {_fmt_cell(hi)}]")
        else:
            lines.append(f"@attribute {col.name} {{{', '.join(col.values)}}}")
    if inputs is None:
        inputs = tuple(c.name for i, c in enumerate(table.columns) if i != ci)
    lines.append(f"@inputs {', '.join(inputs)}")
    lines.append(f"@outputs {table.columns[ci].name}")
    lines.append("@data")
    for row in table.rows:
        lines.append(", ".join(_fmt_cell(c) for c in row))
    return "\n".join(lines) + "\n"


def _fmt_cell(cell) -> str:
    if isinstance(cell, str):
        return cell
    if float(cell) == int(cell) and abs(cell) < 1e15:
        return str(int(cell))
    return repr(float(cell))


def _fold_paths(directory: Path, name: str, fold: int) -> tuple[Path, Path]:
    return (
        directory / f"{name}-5-{fold}tra.dat",
        directory / f"{name}-5-{fold}tst.dat",
    )


def load_fold_pair(directory, name: str, fold: int) -> FoldPair:
    """Load, clean and encode one pre-split train/test fold pair.

    Train and test are encoded with a shared categorical vocabulary (the
    union of both files' declared value sets) so their encoded feature
    spaces align, and with a shared positive class resolved on the union
    of their rows.
    """
    directory = Path(directory)
    tra_path, tst_path = _fold_paths(directory, name, fold)
    missing = [p.name for p in (tra_path, tst_path) if not p.is_file()]
    if missing:
        raise FileNotFoundError(f"missing fold files for {name!r}: {', '.join(missing)}")

    tables = []
    for path in (tra_path, tst_path):
        try:
            tables.append(clean_strings(parse_keel(path.read_text(encoding="utf-8"))))
        except KeelParseError as exc:
            raise KeelParseError(f"{path.name}: {exc}") from exc
    train_raw, test_raw = (_unify_vocabulary(t, tables) for t in tables)

    _check_disjoint(name, fold, train_raw, test_raw)

    ci = train_raw.class_column
    class_values = train_raw.columns[ci].values
    union_labels = [row[ci] for row in (*train_raw.rows, *test_raw.rows)]
    positive = resolve_positive_name(tuple(sorted(class_values)), union_labels)

    train = one_hot_encode(train_raw, positive_name=positive)
    test = one_hot_encode(test_raw, positive_name=positive)
    return FoldPair(fold_index=fold, train=train, test=test)


def _unify_vocabulary(table: RawTable, tables: list[RawTable]) -> RawTable:
    """Give every categorical/class column the union of the declared value
    sets across `tables`, so encodings share one vocabulary."""
    columns = []
    for i, col in enumerate(table.columns):
        if col.kind == NUMERIC:
            columns.append(col)
            continue
        union: list[str] = []
        for t in tables:
            other = t.columns[i]
            if other.name != col.name or other.kind != col.kind:
                raise KeelParseError(
                    f"fold files disagree on column {i}: "
                    f"{col.name}/{col.kind} vs {other.name}/{other.kind}"
                )
            for v in other.values:
                if v not in union:
                    union.append(v)
        columns.append(replace(col, values=tuple(union)))
    return replace(table, columns=tuple(columns))


def _check_disjoint(name: str, fold: int, train: RawTable, test: RawTable) -> None:
    train_rows = set(train.rows)
    overlap = sum(1 for row in test.rows if row in train_rows)
    if overlap:
        raise ValueError(
            f"{name!r} fold {fold}: {overlap} test row(s) are identical to training rows"
        )


def load_fold_pairs(directory, dataset_name: str) -> list[FoldPair]:
    """Load all five pre-split fold pairs of a dataset.

    Reports every absent file at once rather than failing on the first.
    """
    directory = Path(directory)
    missing = []
    for fold in range(1, N_FOLDS + 1):
        for p in _fold_paths(directory, dataset_name, fold):
            if not p.is_file():
                missing.append(p.name)
    if missing:
        raise FileNotFoundError(
            f"dataset {dataset_name!r} in {directory}: missing {len(missing)} of "
            f"{2 * N_FOLDS} fold files: {', '.join(missing)}"
        )
    pairs = [load_fold_pair(directory, dataset_name, fold) for fold in range(1, N_FOLDS + 1)]
    widths = {p.train.n_features for p in pairs} | {p.test.n_features for p in pairs}
    if len(widths) != 1:
        raise ValueError(
            f"dataset {dataset_name!r}: folds disagree on encoded width: {sorted(widths)}"
        )
    return pairs


def write_results_csv(records, path) -> None:
    """Write experiment records as a byte-deterministic CSV.

    Header "dataset,fold,model,scaler,f1,gmean"; rows sorted by
    (dataset, model, scaler, fold); six decimal places; LF endings.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    seen = set()
    for r in records:
        if r.key in seen:
            raise ValueError(f"duplicate record key {r.key}")
        seen.add(r.key)
    ordered = sorted(records, key=lambda r: (r.dataset, r.model, r.scaler, r.fold))
    lines = ["dataset,fold,model,scaler,f1,gmean"]
    lines.extend(
        f"{r.dataset},{r.fold},{r.model},{r.scaler},{r.f1:.6f},{r.gmean:.6f}"
        for r in ordered
    )
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def read_results_csv(path) -> list[ResultRecord]:
    """Read back a results CSV written by write_results_csv."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "dataset,fold,model,scaler,f1,gmean":
        raise ValueError(f"{path}: not a results CSV")
    records = []
    for line in lines[1:]:
        dataset, fold, model, scaler, f1, gmean = line.split(",")
        records.append(
            ResultRecord(
                dataset=dataset, fold=int(fold), model=model, scaler=scaler,
                f1=float(f1), gmean=float(gmean),
            )
        )
    return records
