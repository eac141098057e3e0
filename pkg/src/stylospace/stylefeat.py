"""The 17-dimensional style vector for one script.

Feature blocks, in fixed order: nine identifier-casing ratios (snake /
UpperCamel / lowerCamel, each for variables, function names, class names),
two documentation densities, three function/class averages (decorators,
inheritance), and three language-feature rates (list comprehensions,
generator expressions, lambdas per 100 source lines).

"Variables" are the binding occurrences in assignment statements plus
function parameters; attribute accesses and loop/comprehension targets are
not counted.  Kinds with zero occurrences contribute zero ratios rather
than NaN so vectors stay clusterable.
"""

from __future__ import annotations

import ast
import enum
from dataclasses import dataclass, fields

from . import pysyntax
from .ingest import SourceUnit

__all__ = [
    "CasingClass",
    "StyleVector",
    "FEATURE_NAMES",
    "classify_casing",
    "extract_style_vector",
    "vector_values",
]


class CasingClass(enum.Enum):
    SNAKE = "snake"
    UPPER_CAMEL = "upper_camel"
    LOWER_CAMEL = "lower_camel"
    OTHER = "other"


@dataclass(frozen=True)
class StyleVector:
    snake_var_ratio: float
    snake_func_ratio: float
    snake_class_ratio: float
    ucamel_var_ratio: float
    ucamel_func_ratio: float
    ucamel_class_ratio: float
    lcamel_var_ratio: float
    lcamel_func_ratio: float
    lcamel_class_ratio: float
    docstring_density: float
    comment_density: float
    avg_func_decorators: float
    avg_class_decorators: float
    avg_class_inheritance: float
    listcomp_per_100loc: float
    generator_per_100loc: float
    lambda_per_100loc: float


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(StyleVector))


def vector_values(vec: StyleVector) -> list[float]:
    return [getattr(vec, name) for name in FEATURE_NAMES]


def _case_word_count(s: str) -> int:
    """Number of case-delimited words; an uppercase run counts as one word,
    except that its final capital starts the next word when followed by a
    lowercase letter (XMLParser -> XML + Parser)."""
    count = 0
    i, n = 0, len(s)
    while i < n:
        c = s[i]
        if c.isupper():
            j = i + 1
            while j < n and s[j].isupper():
                j += 1
            if j < n and s[j].islower():
                if j - i > 1:
                    count += 1
                j += 1
                while j < n and not s[j].isupper() and s[j] != "_":
                    j += 1
                count += 1
            else:
                count += 1
            i = j
        elif c.islower():
            j = i + 1
            while j < n and not s[j].isupper() and s[j] != "_":
                j += 1
            count += 1
            i = j
        else:
            i += 1
    return count


def classify_casing(identifier: str) -> CasingClass:
    """Total classification of an identifier into the four casing families.

    Dunder names classify by their inner text (__init__ -> init -> SNAKE).
    Bare lowercase words are degenerate SNAKE; a single capitalized word
    (Foo, FOO) has fewer than two case-delimited words and falls to OTHER,
    as does anything mixing underscores with camel humps.
    """
    if pysyntax.is_dunder(identifier):
        return classify_casing(identifier[2:-2])
    if not any(c.isupper() for c in identifier):
        return CasingClass.SNAKE
    if "_" in identifier:
        return CasingClass.OTHER
    if not identifier:
        return CasingClass.SNAKE
    head = identifier[0]
    words = _case_word_count(identifier)
    if head.isupper() and words >= 2:
        return CasingClass.UPPER_CAMEL
    if head.islower() and words >= 2:
        return CasingClass.LOWER_CAMEL
    return CasingClass.OTHER


def _casing_ratios(names: list[str]) -> tuple[float, float, float]:
    if not names:
        return (0.0, 0.0, 0.0)
    counts = {CasingClass.SNAKE: 0, CasingClass.UPPER_CAMEL: 0, CasingClass.LOWER_CAMEL: 0}
    for name in names:
        cls = classify_casing(name)
        if cls in counts:
            counts[cls] += 1
    total = len(names)
    return (
        counts[CasingClass.SNAKE] / total,
        counts[CasingClass.UPPER_CAMEL] / total,
        counts[CasingClass.LOWER_CAMEL] / total,
    )


def _assigned_names(node: ast.AST) -> list[str]:
    """Name binding occurrences in an assignment target (tuples, lists and
    starred patterns unpacked; attribute/subscript targets skipped)."""
    out: list[str] = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, ast.Name):
            out.append(cur.id)
        elif isinstance(cur, (ast.Tuple, ast.List)):
            stack.extend(reversed(cur.elts))
        elif isinstance(cur, ast.Starred):
            stack.append(cur.value)
    return out


def _collect(tree: ast.Module):
    variables: list[str] = []
    functions: list[str] = []
    classes: list[str] = []
    n_func_decorators = 0
    n_class_decorators = 0
    n_bases = 0
    n_documented = 0
    n_defs = 1  # the module itself
    if tree.body and isinstance(tree.body[0], ast.Expr) and isinstance(
        tree.body[0].value, ast.Constant
    ) and isinstance(tree.body[0].value.value, str):
        n_documented += 1
    n_listcomp = n_genexp = n_lambda = 0

    for node in ast.walk(tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            functions.append(node.name)
            n_func_decorators += len(node.decorator_list)
            n_defs += 1
            if ast.get_docstring(node) is not None:
                n_documented += 1
            args = node.args
            for arg in (
                args.posonlyargs + args.args + args.kwonlyargs
                + ([args.vararg] if args.vararg else [])
                + ([args.kwarg] if args.kwarg else [])
            ):
                variables.append(arg.arg)
        elif isinstance(node, ast.Lambda):
            n_lambda += 1
            args = node.args
            for arg in (
                args.posonlyargs + args.args + args.kwonlyargs
                + ([args.vararg] if args.vararg else [])
                + ([args.kwarg] if args.kwarg else [])
            ):
                variables.append(arg.arg)
        elif isinstance(node, ast.ClassDef):
            classes.append(node.name)
            n_class_decorators += len(node.decorator_list)
            n_bases += len(node.bases)
            n_defs += 1
            if ast.get_docstring(node) is not None:
                n_documented += 1
        elif isinstance(node, ast.Assign):
            for target in node.targets:
                variables.extend(_assigned_names(target))
        elif isinstance(node, (ast.AugAssign, ast.AnnAssign)):
            variables.extend(_assigned_names(node.target))
        elif isinstance(node, ast.NamedExpr):
            variables.extend(_assigned_names(node.target))
        elif isinstance(node, ast.ListComp):
            n_listcomp += 1
        elif isinstance(node, ast.GeneratorExp):
            n_genexp += 1

    return {
        "variables": variables,
        "functions": functions,
        "classes": classes,
        "func_decorators": n_func_decorators,
        "class_decorators": n_class_decorators,
        "bases": n_bases,
        "documented": n_documented,
        "defs": n_defs,
        "listcomp": n_listcomp,
        "genexp": n_genexp,
        "lambda": n_lambda,
    }


def extract_style_vector(unit: SourceUnit) -> StyleVector:
    """Compute the style vector; the unit must have been admitted by ingest
    (parse_ok), anything else is a contract violation."""
    if not unit.parse_ok:
        raise ValueError(f"unit {unit.id} was not admitted as parseable")
    tree = pysyntax.parse_ast(unit.content)
    stats = _collect(tree)
    lines = max(1, unit.line_count)

    smap = pysyntax.SourceMap(unit.content)
    comment_lines = {
        smap.line_index_of_byte(tok.span[0])
        for tok in pysyntax.tokenize(unit.content)
        if tok.kind == "COMMENT"
    }

    sv, uv, lv = _casing_ratios(stats["variables"])
    sf, uf, lf = _casing_ratios(stats["functions"])
    sc, uc, lc = _casing_ratios(stats["classes"])
    n_funcs = len(stats["functions"])
    n_classes = len(stats["classes"])

    return StyleVector(
        snake_var_ratio=sv,
        snake_func_ratio=sf,
        snake_class_ratio=sc,
        ucamel_var_ratio=uv,
        ucamel_func_ratio=uf,
        ucamel_class_ratio=uc,
        lcamel_var_ratio=lv,
        lcamel_func_ratio=lf,
        lcamel_class_ratio=lc,
        docstring_density=stats["documented"] / stats["defs"],
        comment_density=len(comment_lines) / lines,
        avg_func_decorators=stats["func_decorators"] / n_funcs if n_funcs else 0.0,
        avg_class_decorators=stats["class_decorators"] / n_classes if n_classes else 0.0,
        avg_class_inheritance=stats["bases"] / n_classes if n_classes else 0.0,
        listcomp_per_100loc=stats["listcomp"] * 100.0 / lines,
        generator_per_100loc=stats["genexp"] * 100.0 / lines,
        lambda_per_100loc=stats["lambda"] * 100.0 / lines,
    )
