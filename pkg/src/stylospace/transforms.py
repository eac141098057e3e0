"""The five parallel-corpus generators: strip one style attribute from a
script to make the model input X, keep the original as the target Y.

All rewriting is span edits on the original text (via pysyntax), so
everything outside the stripped attribute survives byte for byte.  The
directionality contract: X never contains the stripped attribute, and both
sides of every emitted pair parse.
"""

from __future__ import annotations

import ast
import keyword
from dataclasses import dataclass, field

from . import pysyntax
from .ingest import SourceUnit
from .pysyntax import Edit, SourceMap

__all__ = [
    "TASKS",
    "PROMPTS",
    "SEP_TOKEN",
    "RenameMap",
    "DocstringPair",
    "DeclassifyResult",
    "LowerResult",
    "TransferPair",
    "CorpusOptions",
    "GenReport",
    "strip_comments",
    "strip_casing",
    "strip_docstrings",
    "declassify",
    "declassify_report",
    "lower_listcomps",
    "lower_listcomps_report",
    "build_corpus",
    "model_input",
    "pair_to_json_obj",
    "pair_from_json_obj",
]

TASKS = ("casing", "docstring", "comment", "class", "listcomp")

PROMPTS = {
    "comment": "transfer: add comments",
    "docstring": "transfer: add docstring",
    "casing": "transfer: apply casing",
    "class": "transfer: add class structure",
    "listcomp": "transfer: use list comprehension",
}

SEP_TOKEN = "<sep>"


# --- comments ----------------------------------------------------------


def strip_comments(source: str) -> str:
    """Remove every comment token; lines left empty disappear and trailing
    whitespace before an inline comment is trimmed."""
    pysyntax.parse_ast(source)
    smap = SourceMap(source)
    edits: list[Edit] = []
    for tok in pysyntax.tokenize(source):
        if tok.kind != "COMMENT":
            continue
        start, end = tok.span
        line_idx = smap.line_index_of_byte(start)
        line_start = smap.line_start_bytes[line_idx]
        if smap.data[line_start:start].strip() == b"":
            line_end = smap.line_start_bytes[line_idx + 1]
            edits.append(Edit((line_start, line_end), ""))
        else:
            w = start
            while w > line_start and smap.data[w - 1 : w] in (b" ", b"\t"):
                w -= 1
            edits.append(Edit((w, end), ""))
    return pysyntax.apply_edits(source, edits)


# --- casing ------------------------------------------------------------


@dataclass(frozen=True)
class RenameMap:
    """Original -> normalized identifier map, insertion-ordered by first
    occurrence.  ``collisions`` lists normalized forms with more than one
    distinct preimage in the file."""

    renames: dict[str, str]
    collisions: tuple[str, ...] = ()

    def invert(self) -> dict[str, str]:
        if self.collisions:
            raise ValueError(f"rename map is not injective: {self.collisions}")
        return {v: k for k, v in self.renames.items()}


def normalize_identifier(name: str) -> str:
    return name.lower().replace("_", "")


def strip_casing(source: str) -> tuple[str, RenameMap]:
    """Lowercase every name token and strip its underscores; dunder names
    keep their protocol form.  A rename that would collapse an identifier
    into a keyword (or into nothing, e.g. ``_``) is not applied: the result
    must stay parseable."""
    pysyntax.parse_ast(source)
    edits: list[Edit] = []
    renames: dict[str, str] = {}
    preimages: dict[str, set[str]] = {}
    for tok in pysyntax.tokenize(source):
        if tok.kind != "NAME" or pysyntax.is_dunder(tok.text):
            continue
        norm = normalize_identifier(tok.text)
        if norm == tok.text:
            preimages.setdefault(norm, set()).add(tok.text)
            continue
        if not norm or keyword.iskeyword(norm):
            continue
        preimages.setdefault(norm, set()).add(tok.text)
        renames.setdefault(tok.text, norm)
        edits.append(Edit(tok.span, norm))
    collisions = tuple(sorted(n for n, origs in preimages.items() if len(origs) > 1))
    return pysyntax.apply_edits(source, edits), RenameMap(renames, collisions)


# --- docstrings ---------------------------------------------------------


@dataclass(frozen=True)
class DocstringPair:
    input: str
    target: str
    span: tuple[int, int]
    name: str


def _docstring_stmt(node) -> ast.Expr | None:
    if (
        node.body
        and isinstance(node.body[0], ast.Expr)
        and isinstance(node.body[0].value, ast.Constant)
        and isinstance(node.body[0].value.value, str)
    ):
        return node.body[0]
    return None


def _docstring_removal_edit(smap: SourceMap, owner) -> Edit | None:
    """Edit deleting the leading string statement of ``owner``; inserts
    ``pass`` when the body would become empty."""
    doc = _docstring_stmt(owner)
    if doc is None:
        return None
    ds, de = smap.node_span(doc)
    line_idx = smap.line_index_of_byte(ds)
    line_start = smap.line_start_bytes[line_idx]
    before = smap.data[line_start:ds]
    j = de
    data = smap.data
    while data[j : j + 1] in (b" ", b"\t"):
        j += 1
    if data[j : j + 1] == b";":
        j += 1
        while data[j : j + 1] in (b" ", b"\t"):
            j += 1
        trailing_stmt = True
    else:
        trailing_stmt = False
    end_line_idx = smap.line_index_of_byte(max(de - 1, ds))
    end_line_stop = smap.line_start_bytes[end_line_idx + 1]
    lone_body = len(owner.body) == 1

    if before.strip() == b"" and not trailing_stmt and data[j:end_line_stop].strip() == b"":
        if lone_body:
            indent = before.decode("utf-8")
            newline = "\n" if data[end_line_stop - 1 : end_line_stop] == b"\n" else ""
            return Edit((line_start, end_line_stop), indent + "pass" + newline)
        return Edit((line_start, end_line_stop), "")
    return Edit((ds, j), "pass" if lone_body else "")


def _dedent_block(text: str, prefix: str) -> str:
    if not prefix:
        return text
    return "".join(
        line[len(prefix):] if line.startswith(prefix) else line
        for line in text.splitlines(keepends=True)
    )


def strip_docstrings(source: str) -> list[DocstringPair]:
    """One (X, Y) pair per documented function: Y is the function's source
    slice (dedented when nested), X the same slice with the docstring
    statement removed.  Undocumented functions are skipped."""
    tree = pysyntax.parse_ast(source)
    smap = SourceMap(source)
    pairs: list[DocstringPair] = []
    for node in ast.walk(tree):
        if not isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            continue
        edit = _docstring_removal_edit(smap, node)
        if edit is None:
            continue
        fs, fe = smap.node_span(node)
        slice_start = smap.line_start_of_byte(fs)
        prefix = smap.data[slice_start:fs].decode("utf-8")
        if prefix.strip():
            continue  # def shares its line with other code; no clean slice
        # take whole lines: the suite owns its last line, so extending to the
        # newline is still the function's exact source
        slice_end = smap.line_start_bytes[smap.line_index_of_byte(max(fe - 1, fs)) + 1]
        target = smap.data[slice_start:slice_end].decode("utf-8")
        rebased = Edit((edit.span[0] - slice_start, edit.span[1] - slice_start), edit.replacement)
        stripped = pysyntax.apply_edits(target, [rebased])
        x_text = _dedent_block(stripped, prefix)
        y_text = _dedent_block(target, prefix)
        if not y_text.endswith("\n"):
            x_text += "\n"
            y_text += "\n"
        if x_text != y_text and pysyntax.parse_ok(x_text) and pysyntax.parse_ok(y_text):
            pairs.append(DocstringPair(x_text, y_text, (slice_start, slice_end), node.name))
    return pairs


def _remove_function_docstrings(source: str) -> tuple[str, int]:
    """File-level variant used for multi-task composition: delete the
    docstring of every function in place."""
    tree = pysyntax.parse_ast(source)
    smap = SourceMap(source)
    edits = []
    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            edit = _docstring_removal_edit(smap, node)
            if edit is not None:
                edits.append(edit)
    return pysyntax.apply_edits(source, edits), len(edits)


# --- classes ------------------------------------------------------------


@dataclass
class DeclassifyResult:
    text: str
    n_removed: int
    skipped: list[str] = field(default_factory=list)


def _first_positional_arg(fn) -> ast.arg | None:
    args = fn.args
    ordered = list(args.posonlyargs) + list(args.args)
    if not ordered:
        return None
    if args.posonlyargs and len(args.posonlyargs) == 1:
        # removing the lone positional-only arg would strand the `/` marker
        return None
    return ordered[0]


def declassify_report(source: str) -> DeclassifyResult:
    """Remove class statements: header and decorators go away, the class
    docstring goes away, methods dedent one level, a leading self/cls
    parameter is dropped, and ``self.x``/``cls.x`` become bare ``x``.

    A class whose body is only a docstring is skipped (nothing would
    remain) and reported.  Output parses; it need not run.
    """
    tree = pysyntax.parse_ast(source)
    smap = SourceMap(source)
    n_lines = len(smap.lines)
    deleted = [False] * n_lines
    extra_dedent = [0] * n_lines
    point_edits: list[Edit] = []
    attr_spans: set[tuple[int, int]] = set()
    skipped: list[str] = []
    n_removed = 0

    classes = [n for n in ast.walk(tree) if isinstance(n, ast.ClassDef)]
    classes.sort(key=lambda n: smap.node_span(n)[0])

    for node in classes:
        doc = _docstring_stmt(node)
        body = node.body[1:] if doc is not None else list(node.body)
        if not body:
            skipped.append(node.name)
            continue
        n_removed += 1

        cs, ce = smap.node_span(node)
        first_line = smap.line_index_of_byte(cs)
        class_prefix = smap.data[smap.line_start_bytes[first_line] : cs].decode("utf-8")
        kw_byte = smap.from_ast_pos(node.lineno, node.col_offset)
        kw_line = smap.line_index_of_byte(kw_byte)
        body0_start = smap.node_span(node.body[0])[0]
        body_line = smap.line_index_of_byte(body0_start)

        if body_line > kw_line:
            for line in range(first_line, body_line):
                deleted[line] = True
            body_prefix = smap.data[
                smap.line_start_bytes[body_line] : body0_start
            ].decode("utf-8")
            extra = len(body_prefix) - len(class_prefix)
            if extra > 0:
                last_line = smap.line_index_of_byte(max(ce - 1, body0_start))
                for line in range(body_line, last_line + 1):
                    extra_dedent[line] += extra
            if doc is not None:
                ds, de = smap.node_span(doc)
                d_first = smap.line_index_of_byte(ds)
                d_last = smap.line_index_of_byte(max(de - 1, ds))
                alone = (
                    smap.data[smap.line_start_bytes[d_first] : ds].strip() == b""
                    and smap.data[de : smap.line_start_bytes[d_last + 1]].strip() == b""
                )
                if alone:
                    for line in range(d_first, d_last + 1):
                        deleted[line] = True
                else:
                    edit = _docstring_removal_edit(smap, node)
                    if edit is not None and edit.replacement == "":
                        point_edits.append(edit)
        else:
            # one-liner class: decorators (if any) occupy earlier lines
            for line in range(first_line, kw_line):
                deleted[line] = True
            point_edits.append(Edit((kw_byte, body0_start), ""))
            if doc is not None:
                edit = _docstring_removal_edit(smap, node)
                if edit is not None and edit.replacement == "":
                    point_edits.append(edit)

        for stmt in node.body:
            if not isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
                continue
            first = _first_positional_arg(stmt)
            if first is None or first.arg not in ("self", "cls"):
                continue
            ps, pe = smap.node_span(first)
            j = pe
            data = smap.data
            while data[j : j + 1] in (b" ", b"\t", b"\r", b"\n", b"\\"):
                j += 1
            if data[j : j + 1] == b",":
                j += 1
                while data[j : j + 1] in (b" ", b"\t"):
                    j += 1
                point_edits.append(Edit((ps, j), ""))
            else:
                point_edits.append(Edit((ps, pe), ""))

        for sub in ast.walk(node):
            if (
                isinstance(sub, ast.Attribute)
                and isinstance(sub.value, ast.Name)
                and sub.value.id in ("self", "cls")
            ):
                vs = smap.node_span(sub.value)[0]
                attr_start = smap.node_span(sub)[1] - len(sub.attr.encode("utf-8"))
                attr_spans.add((vs, attr_start))

    edits = list(point_edits)
    edits.extend(Edit(span, "") for span in attr_spans)
    for line in range(n_lines):
        if deleted[line]:
            edits.append(
                Edit((smap.line_start_bytes[line], smap.line_start_bytes[line + 1]), "")
            )
        elif extra_dedent[line]:
            raw = smap.lines[line]
            avail = len(raw) - len(raw.lstrip(" \t"))
            strip = min(extra_dedent[line], avail)
            if strip:
                start = smap.line_start_bytes[line]
                edits.append(Edit((start, start + strip), ""))
    text = pysyntax.apply_edits(source, edits)
    return DeclassifyResult(text=text, n_removed=n_removed, skipped=skipped)


def declassify(source: str) -> str:
    return declassify_report(source).text


# --- list comprehensions -------------------------------------------------


@dataclass
class LowerResult:
    text: str
    n_lowered: int
    n_skipped: int


def _parent_map(tree) -> dict:
    parents = {}
    for node in ast.walk(tree):
        for child in ast.iter_child_nodes(node):
            parents[child] = node
    return parents


def _in_decorator(node, parents) -> bool:
    cur = node
    while cur in parents:
        par = parents[cur]
        if cur in getattr(par, "decorator_list", ()):
            return True
        cur = par
    return False


class _ComprehensionLowering:
    """Rewrites each list comprehension to a call of a generated
    zero-argument helper that builds the list with nested for/if clauses.

    Helpers for comprehensions nested inside another lowered comprehension
    are emitted inside the parent helper, right before the line that uses
    them, so free variables bound by outer clauses stay in scope; top-level
    helpers are inserted immediately before the enclosing statement.
    Numbering is per file, innermost first.
    """

    def __init__(self, source: str):
        self.source = source
        self.smap = SourceMap(source)
        self.tree = pysyntax.parse_ast(source)
        self.parents = _parent_map(self.tree)
        self.counter = 0
        self.n_skipped = 0
        self.names: dict[ast.ListComp, str] = {}
        self.lowered: set[ast.ListComp] = set()

    def _skip_reason(self, comp: ast.ListComp) -> bool:
        if any(gen.is_async for gen in comp.generators):
            return True
        if _in_decorator(comp, self.parents):
            return True
        cur = comp
        while cur in self.parents:
            par = self.parents[cur]
            if isinstance(par, ast.Lambda):
                return True
            if isinstance(par, ast.JoinedStr):
                return True  # position info inside f-strings is unreliable
            if isinstance(par, (ast.SetComp, ast.DictComp, ast.GeneratorExp)):
                return True  # enclosing scope is not being lowered
            if isinstance(par, ast.ListComp):
                return par not in self.candidates
            if isinstance(par, ast.stmt):
                return False
            cur = par
        return False

    def _enclosing_stmt(self, comp: ast.ListComp) -> ast.stmt:
        cur = comp
        while not isinstance(cur, ast.stmt):
            cur = self.parents[cur]
        while True:
            start = self.smap.node_span(cur)[0]
            if isinstance(cur, ast.If) and self.smap.data[start : start + 4] == b"elif":
                cur = self.parents[cur]  # hoist above the elif chain
                continue
            return cur

    def run(self) -> LowerResult:
        comps = [n for n in ast.walk(self.tree) if isinstance(n, ast.ListComp)]
        comps.sort(key=lambda n: self.smap.node_span(n)[0])
        if not comps:
            return LowerResult(self.source, 0, 0)

        # outer-to-inner skip propagation: a comp survives only if every
        # enclosing list comp also survives
        self.candidates: set[ast.ListComp] = set()
        for comp in comps:
            if not self._skip_reason(comp):
                self.candidates.add(comp)
            else:
                self.n_skipped += 1
        if not self.candidates:
            return LowerResult(self.source, 0, self.n_skipped)

        by_stmt: dict[int, tuple[ast.stmt, list[ast.ListComp]]] = {}
        order: list[int] = []
        for comp in comps:
            if comp not in self.candidates:
                continue
            if any(
                isinstance(anc, ast.ListComp) and anc in self.candidates
                for anc in self._ancestors(comp)
            ):
                continue  # embedded in a lowered parent, handled recursively
            stmt = self._enclosing_stmt(comp)
            key = id(stmt)
            if key not in by_stmt:
                by_stmt[key] = (stmt, [])
                order.append(key)
            by_stmt[key][1].append(comp)

        edits: list[Edit] = []
        inserts: dict[int, list[str]] = {}
        for key in order:
            stmt, top_comps = by_stmt[key]
            stmt_start = self.smap.node_span(stmt)[0]
            line_idx = self.smap.line_index_of_byte(stmt_start)
            insert_at = self.smap.line_start_bytes[line_idx]
            raw_line = self.smap.lines[line_idx]
            indent = raw_line[: len(raw_line) - len(raw_line.lstrip(" \t"))]
            for comp in top_comps:
                name = self._assign_names(comp)
                block = self._helper_text(comp, name)
                inserts.setdefault(insert_at, []).append(self._indent_block(block, indent))
                edits.append(Edit(self.smap.node_span(comp), f"{name}()"))
        for insert_at, blocks in inserts.items():
            edits.append(Edit((insert_at, insert_at), "".join(blocks)))

        text = pysyntax.apply_edits(self.source, edits)
        return LowerResult(text, len(self.lowered), self.n_skipped)

    def _ancestors(self, node):
        cur = node
        while cur in self.parents:
            cur = self.parents[cur]
            yield cur

    def _assign_names(self, comp: ast.ListComp) -> str:
        """Post-order numbering: nested helpers get lower indices."""
        for child in self._direct_children(comp):
            self._assign_names(child)
        name = f"_lc_{self.counter}"
        self.counter += 1
        self.names[comp] = name
        self.lowered.add(comp)
        return name

    def _direct_children(self, comp: ast.ListComp) -> list[ast.ListComp]:
        out = []
        for node in ast.walk(comp):
            if node is comp or not isinstance(node, ast.ListComp):
                continue
            if node not in self.candidates:
                continue
            anc = next(
                (
                    a
                    for a in self._ancestors(node)
                    if isinstance(a, ast.ListComp) and a in self.candidates
                ),
                None,
            )
            if anc is comp:
                out.append(node)
        out.sort(key=lambda n: self.smap.node_span(n)[0])
        return out

    def _children_within(self, comp, expr) -> list[ast.ListComp]:
        lo, hi = self.smap.node_span(expr)
        return [
            c
            for c in self._direct_children(comp)
            if lo <= self.smap.node_span(c)[0] and self.smap.node_span(c)[1] <= hi
        ]

    def _expr_text(self, comp, expr) -> tuple[str, list[ast.ListComp]]:
        """Source text of ``expr`` with directly nested lowered
        comprehensions replaced by their helper calls."""
        lo, hi = self.smap.node_span(expr)
        text = self.smap.data[lo:hi].decode("utf-8")
        children = self._children_within(comp, expr)
        for child in sorted(children, key=lambda c: -self.smap.node_span(c)[0]):
            cs, ce = self.smap.node_span(child)
            text = text[: cs - lo] + f"{self.names[child]}()" + text[ce - lo :]
        return text, children

    @staticmethod
    def _wrap(text: str) -> str:
        return f"({text})" if "\n" in text else text

    @staticmethod
    def _indent_block(block: str, indent: str) -> str:
        return "".join(
            indent + line if line.strip() else line
            for line in block.splitlines(keepends=True)
        )

    def _helper_text(self, comp: ast.ListComp, name: str) -> str:
        lines: list[str] = [f"def {name}():", "    result = []"]
        depth = 1

        def pad() -> str:
            return "    " * depth

        def emit_child_defs(children):
            for child in children:
                block = self._helper_text(child, self.names[child])
                lines.extend(self._indent_block(block, pad()).splitlines())

        for gen in comp.generators:
            target_text = self.smap.slice(self.smap.node_span(gen.target))
            iter_text, iter_children = self._expr_text(comp, gen.iter)
            emit_child_defs(iter_children)
            lines.append(f"{pad()}for {self._wrap(target_text)} in {self._wrap(iter_text)}:")
            depth += 1
            for cond in gen.ifs:
                cond_text, cond_children = self._expr_text(comp, cond)
                emit_child_defs(cond_children)
                lines.append(f"{pad()}if {self._wrap(cond_text)}:")
                depth += 1
        elt_text, elt_children = self._expr_text(comp, comp.elt)
        emit_child_defs(elt_children)
        lines.append(f"{pad()}result.append({elt_text})")
        lines.append("    return result")
        return "\n".join(lines) + "\n"


def lower_listcomps_report(source: str) -> LowerResult:
    return _ComprehensionLowering(source).run()


def lower_listcomps(source: str) -> str:
    """Replace each list comprehension with an equivalent generated helper
    function call; occurrences that cannot be lowered (inside lambdas,
    decorator lines, f-strings, other comprehension scopes, or async
    comprehensions) are skipped and counted in the report variant."""
    return lower_listcomps_report(source).text


# --- corpus generation ----------------------------------------------------


@dataclass(frozen=True)
class CorpusOptions:
    max_lines: int = 120


@dataclass
class TransferPair:
    task: str
    prompt: str
    input: str
    target: str
    meta: dict


@dataclass
class GenReport:
    units: int = 0
    pairs: int = 0
    skipped_no_attribute: int = 0
    skipped_oversize: int = 0
    skipped_unchanged: int = 0
    skipped_residual: int = 0
    skipped_invalid: int = 0
    collisions: int = 0


def model_input(pair: TransferPair) -> str:
    return f"{pair.prompt}{SEP_TOKEN}{pair.input}"


def pair_to_json_obj(pair: TransferPair) -> dict:
    return {
        "task": pair.task,
        "prompt": pair.prompt,
        "input": pair.input,
        "target": pair.target,
        "meta": pair.meta,
    }


def pair_from_json_obj(obj: dict) -> TransferPair:
    return TransferPair(
        task=obj["task"],
        prompt=obj["prompt"],
        input=obj["input"],
        target=obj["target"],
        meta=dict(obj.get("meta", {})),
    )


def _has_comment(source: str) -> bool:
    return any(t.kind == "COMMENT" for t in pysyntax.tokenize(source))


def _emit(pairs, report, task, prompt, x, y, meta) -> None:
    if x == y:
        report.skipped_unchanged += 1
        return
    if not (pysyntax.parse_ok(x) and pysyntax.parse_ok(y)):
        report.skipped_invalid += 1
        return
    pairs.append(TransferPair(task=task, prompt=prompt, input=x, target=y, meta=meta))
    report.pairs += 1


def _single_task_pairs(unit: SourceUnit, task: str, options, pairs, report) -> None:
    meta_base = {"id": unit.id, "span": [0, len(unit.content.encode("utf-8"))], "collisions": []}
    prompt = PROMPTS[task]

    if task != "docstring" and unit.line_count > options.max_lines:
        report.skipped_oversize += 1
        return

    if task == "comment":
        if not _has_comment(unit.content):
            report.skipped_no_attribute += 1
            return
        _emit(pairs, report, task, prompt, strip_comments(unit.content), unit.content, meta_base)
        return

    base = strip_comments(unit.content)
    if task == "casing":
        x, rmap = strip_casing(base)
        if not rmap.renames:
            report.skipped_no_attribute += 1
            return
        if rmap.collisions:
            report.collisions += 1
        meta = dict(meta_base, collisions=list(rmap.collisions))
        _emit(pairs, report, task, prompt, x, base, meta)
    elif task == "docstring":
        fn_pairs = strip_docstrings(base)
        if not fn_pairs:
            report.skipped_no_attribute += 1
            return
        for fp in fn_pairs:
            meta = dict(meta_base, span=list(fp.span), function=fp.name)
            _emit(pairs, report, task, prompt, fp.input, fp.target, meta)
    elif task == "class":
        result = declassify_report(base)
        if result.n_removed == 0:
            report.skipped_no_attribute += 1
            return
        _emit(pairs, report, task, prompt, result.text, base, meta_base)
    elif task == "listcomp":
        result = lower_listcomps_report(base)
        if result.n_lowered == 0 and result.n_skipped == 0:
            report.skipped_no_attribute += 1
            return
        if result.n_skipped > 0:
            report.skipped_residual += 1  # X would still contain a comprehension
            return
        _emit(pairs, report, task, prompt, result.text, base, meta_base)
    else:
        raise ValueError(f"unknown task {task!r}")


_MULTI_ORDER = ("comment", "docstring", "class", "listcomp", "casing")


def _multi_task_pairs(unit: SourceUnit, tasks, options, pairs, report) -> None:
    if unit.line_count > options.max_lines:
        report.skipped_oversize += 1
        return
    base = strip_comments(unit.content)
    target = unit.content if "comment" in tasks else base
    work = base
    collisions: list[str] = []
    for task in _MULTI_ORDER:
        if task not in tasks:
            continue
        if task == "comment":
            if not _has_comment(unit.content):
                report.skipped_no_attribute += 1
                return
            continue  # already removed from `work` via base
        before = work
        if task == "docstring":
            work, n = _remove_function_docstrings(work)
            changed = n > 0
        elif task == "class":
            result = declassify_report(work)
            work, changed = result.text, result.n_removed > 0
        elif task == "listcomp":
            lowered = lower_listcomps_report(work)
            if lowered.n_skipped > 0:
                report.skipped_residual += 1
                return
            work, changed = lowered.text, lowered.n_lowered > 0
        else:  # casing
            work, rmap = strip_casing(work)
            changed = bool(rmap.renames)
            collisions = list(rmap.collisions)
        if not changed or work == before:
            report.skipped_no_attribute += 1
            return
    prompt = ", ".join(PROMPTS[t] for t in tasks)
    meta = {
        "id": unit.id,
        "span": [0, len(unit.content.encode("utf-8"))],
        "collisions": collisions,
    }
    _emit(pairs, report, "+".join(tasks), prompt, work, target, meta)


def build_corpus(
    units, task, options: CorpusOptions = CorpusOptions()
) -> tuple[list[TransferPair], GenReport]:
    """Generate the parallel corpus for one task (or a composed multi-task
    when ``task`` is a list/comma string).  Comment stripping happens first
    for every non-comment task so that neither side carries comments;
    pairs where nothing changed are dropped."""
    if isinstance(task, str):
        tasks = [t.strip() for t in task.split(",") if t.strip()]
    else:
        tasks = list(task)
    for t in tasks:
        if t not in TASKS:
            raise ValueError(f"unknown task {t!r}; expected one of {TASKS}")
    if not tasks:
        raise ValueError("no task given")

    pairs: list[TransferPair] = []
    report = GenReport()
    for unit in units:
        report.units += 1
        if len(tasks) == 1:
            _single_task_pairs(unit, tasks[0], options, pairs, report)
        else:
            _multi_task_pairs(unit, tasks, options, pairs, report)
    return pairs, report
