"""Product line definition files: feature models, viewpoint metamodels,
applied-to declarations, and global default seeds.

Format, one declaration per statement:

    VIEWPOINT <name> (<Metaclass>, ...);

    FEATUREMODEL <name> [XOR|OR] {
        MANDATORY <Feature> [XOR|OR] [ABSTRACT] [{ <children> }]
        OPTIONAL <Feature> ...
        REQUIRES <lhs> <rhs>
        EXCLUDES <lhs> <rhs>
    }

    LOCAL <root> APPLIED TO <viewpoint>.<metaclass>;

    DEFAULTS (<feature>, ...);

The FEATUREMODEL block's name is its root feature. Children of an XOR/OR
feature are written bare (the group makes them optional). Exactly one
FEATUREMODEL must not appear in any LOCAL line: that one is the global model,
and every local model's tree must be repeated under the same-named feature
inside it. DEFAULTS seeds the product's global selection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, UnknownFeature, UnknownLocalModel, UnknownMetaclass
from .features import (
    EXCLUDES,
    GLOBAL,
    LOCAL,
    MANDATORY,
    OPTIONAL,
    OR,
    REQUIRES,
    XOR,
    CrossTreeConstraint,
    Feature,
    FeatureModel,
    build_feature_model,
)
from .lexer import DEFINITION_KEYWORDS, EOF, IDENT, TokenStream, tokenize
from .multimodel import AppliedToDeclaration, FunctionalModel
from .syntax import Span

_INDENT = "    "


@dataclass(frozen=True)
class SplDefinition:
    """A parsed definition: the functional model, the viewpoint metamodel
    table (metaclass order preserved), the applied-to declarations, and the
    default global-selection seeds."""

    functional: FunctionalModel
    viewpoints: dict[str, tuple[str, ...]]
    applied_to: tuple[AppliedToDeclaration, ...]
    defaults: tuple[str, ...] = ()
    source_name: str = field(default="<definition>", compare=False)
    defaults_span: Span | None = field(default=None, compare=False)


def parse_spl_definition(source: str, filename: str = "<definition>") -> SplDefinition:
    return _DefinitionParser(source).parse(filename)


class _DefinitionParser:

    def __init__(self, source: str):
        self.ts = TokenStream(tokenize(source, DEFINITION_KEYWORDS))

    def parse(self, filename: str) -> SplDefinition:
        viewpoints: dict[str, tuple[str, ...]] = {}
        trees: dict[str, tuple[Feature, tuple[CrossTreeConstraint, ...]]] = {}
        applied: list[AppliedToDeclaration] = []
        defaults: tuple[str, ...] | None = None
        defaults_span: Span | None = None

        while not self.ts.at(EOF):
            if self.ts.at("VIEWPOINT"):
                self.viewpoint_decl(viewpoints)
            elif self.ts.at("FEATUREMODEL"):
                self.model_block(trees)
            elif self.ts.at("LOCAL"):
                applied.append(self.local_decl())
            elif self.ts.at("DEFAULTS"):
                if defaults is not None:
                    tok = self.ts.current
                    raise ParseError("definition declares DEFAULTS twice",
                                     tok.line, tok.column)
                defaults, defaults_span = self.defaults_decl()
            else:
                self.ts.fail("VIEWPOINT", "FEATUREMODEL", "LOCAL", "DEFAULTS")

        local_names = {d.local_model for d in applied}
        for decl in applied:
            if decl.local_model not in trees:
                raise UnknownLocalModel(
                    f"LOCAL references undeclared feature model {decl.local_model!r}")
            if decl.viewpoint not in viewpoints:
                raise UnknownMetaclass(f"no viewpoint named {decl.viewpoint!r}")
            if decl.metaclass not in viewpoints[decl.viewpoint]:
                raise UnknownMetaclass(
                    f"viewpoint {decl.viewpoint!r} declares no metaclass {decl.metaclass!r}")

        global_names = [n for n in trees if n not in local_names]
        if len(global_names) != 1:
            shown = ", ".join(global_names) or "none"
            raise ParseError(
                "definition needs exactly one feature model not declared LOCAL "
                f"(the global model); candidates: {shown}", 1, 1)
        global_name = global_names[0]

        global_model = build_feature_model(*trees[global_name],
                                           model_kind=GLOBAL, name=global_name)
        locals_ = {name: build_feature_model(*trees[name], model_kind=LOCAL, name=name)
                   for name in trees if name in local_names}
        functional = FunctionalModel(global_model, locals_)

        defaults = defaults or ()
        unknown = set(defaults) - global_model.feature_names
        if unknown:
            raise UnknownFeature(
                "DEFAULTS names features missing from the global model: "
                + ", ".join(sorted(unknown)))

        deduped: list[AppliedToDeclaration] = []
        for decl in applied:
            if decl not in deduped:
                deduped.append(decl)

        return SplDefinition(functional, viewpoints, tuple(deduped), defaults,
                             source_name=filename, defaults_span=defaults_span)

    # -- declarations -------------------------------------------------------

    def viewpoint_decl(self, viewpoints: dict[str, tuple[str, ...]]) -> None:
        self.ts.expect("VIEWPOINT")
        name = self.ts.expect(IDENT)
        if name.text in viewpoints:
            raise ParseError(f"duplicate viewpoint {name.text!r}",
                             name.line, name.column)
        self.ts.expect("(")
        metaclasses = [self.ts.expect(IDENT).text]
        while self.ts.match(","):
            metaclasses.append(self.ts.expect(IDENT).text)
        self.ts.expect(")")
        self.ts.expect(";")
        viewpoints[name.text] = tuple(metaclasses)

    def model_block(self, trees: dict) -> None:
        self.ts.expect("FEATUREMODEL")
        name = self.ts.expect(IDENT)
        if name.text in trees:
            raise ParseError(f"duplicate feature model {name.text!r}",
                             name.line, name.column)
        group = self.group_marker()
        self.ts.expect("{")
        children: list[Feature] = []
        constraints: list[CrossTreeConstraint] = []
        while True:
            if self.ts.at("REQUIRES", "EXCLUDES"):
                constraints.append(self.constraint())
            elif group is None and self.ts.at("MANDATORY", "OPTIONAL"):
                children.append(self.feature_node(kinded=True))
            elif group is not None and self.ts.at(IDENT):
                children.append(self.feature_node(kinded=False))
            else:
                break
        if group is None:
            self.ts.expect("}", "MANDATORY", "OPTIONAL", "REQUIRES", "EXCLUDES")
        else:
            self.ts.expect("}", IDENT, "REQUIRES", "EXCLUDES")
        root = Feature(name.text, MANDATORY, group, False, tuple(children))
        trees[name.text] = (root, tuple(constraints))

    def feature_node(self, kinded: bool) -> Feature:
        if kinded:
            kind = MANDATORY if self.ts.expect("MANDATORY", "OPTIONAL").kind == "MANDATORY" \
                else OPTIONAL
        else:
            kind = OPTIONAL
        name = self.ts.expect(IDENT)
        group = self.group_marker()
        abstract = self.ts.match("ABSTRACT") is not None
        children: tuple[Feature, ...] = ()
        if self.ts.match("{"):
            gathered: list[Feature] = []
            while True:
                if group is None and self.ts.at("MANDATORY", "OPTIONAL"):
                    gathered.append(self.feature_node(kinded=True))
                elif group is not None and self.ts.at(IDENT):
                    gathered.append(self.feature_node(kinded=False))
                else:
                    break
            if group is None:
                self.ts.expect("}", "MANDATORY", "OPTIONAL")
            else:
                self.ts.expect("}", IDENT)
            children = tuple(gathered)
        return Feature(name.text, kind, group, abstract, children)

    def group_marker(self) -> str | None:
        if self.ts.match("XOR"):
            return XOR
        if self.ts.match("OR"):
            return OR
        return None

    def constraint(self) -> CrossTreeConstraint:
        tok = self.ts.expect("REQUIRES", "EXCLUDES")
        kind = REQUIRES if tok.kind == "REQUIRES" else EXCLUDES
        lhs = self.ts.expect(IDENT)
        rhs = self.ts.expect(IDENT)
        return CrossTreeConstraint(kind, lhs.text, rhs.text)

    def local_decl(self) -> AppliedToDeclaration:
        self.ts.expect("LOCAL")
        root = self.ts.expect(IDENT)
        self.ts.expect("APPLIED")
        self.ts.expect("TO")
        viewpoint = self.ts.expect(IDENT)
        self.ts.expect(".")
        metaclass = self.ts.expect(IDENT)
        self.ts.expect(";")
        return AppliedToDeclaration(root.text, viewpoint.text, metaclass.text)

    def defaults_decl(self) -> tuple[tuple[str, ...], Span]:
        start = self.ts.expect("DEFAULTS")
        self.ts.expect("(")
        names: list[str] = []
        if not self.ts.at(")"):
            names.append(self.ts.expect(IDENT).text)
            while self.ts.match(","):
                names.append(self.ts.expect(IDENT).text)
        self.ts.expect(")")
        end = self.ts.expect(";")
        return tuple(names), Span(start.offset, end.end, start.line, start.column)


# ---------------------------------------------------------------------------
# Canonical printing
# ---------------------------------------------------------------------------

def format_spl(definition: SplDefinition) -> str:
    """Canonical text for a definition; parsing it back compares equal."""
    sections: list[str] = []

    viewpoint_lines = [
        f"VIEWPOINT {name} ({', '.join(metaclasses)});"
        for name, metaclasses in definition.viewpoints.items()]
    if viewpoint_lines:
        sections.append("\n".join(viewpoint_lines))

    sections.append(_model_block(definition.functional.global_model))
    for local in definition.functional.locals.values():
        sections.append(_model_block(local))

    local_lines = [
        f"LOCAL {d.local_model} APPLIED TO {d.viewpoint}.{d.metaclass};"
        for d in definition.applied_to]
    if local_lines:
        sections.append("\n".join(local_lines))

    if definition.defaults:
        sections.append(f"DEFAULTS ({', '.join(definition.defaults)});")

    return "\n\n".join(sections) + "\n"


def _model_block(fm: FeatureModel) -> str:
    root = fm.root
    head = f"FEATUREMODEL {root.name}"
    if root.group is not None:
        head += f" {root.group.upper()}"
    lines = [head + " {"]
    for child in root.children:
        _node_lines(child, 1, root.group is not None, lines)
    for ct in fm.constraints:
        lines.append(f"{_INDENT}{ct.kind.upper()} {ct.lhs} {ct.rhs}")
    lines.append("}")
    return "\n".join(lines)


def _node_lines(feature: Feature, depth: int, in_group: bool, lines: list[str]) -> None:
    head = _INDENT * depth
    if not in_group:
        head += feature.kind.upper() + " "
    head += feature.name
    if feature.group is not None:
        head += f" {feature.group.upper()}"
    if feature.abstract:
        head += " ABSTRACT"
    if feature.children:
        lines.append(head + " {")
        for child in feature.children:
            _node_lines(child, depth + 1, feature.group is not None, lines)
        lines.append(_INDENT * depth + "}")
    else:
        lines.append(head)
