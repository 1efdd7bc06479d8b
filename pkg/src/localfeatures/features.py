"""Feature models: trees of mandatory/optional features with xor/or groups,
cross-tree constraints, configuration validation, exhaustive enumeration, and
closure of partial selections.

A configuration is a plain frozenset of feature names. Validity follows the
usual tree semantics: the root is always selected, selection is parent-closed,
mandatory children of selected features are selected, xor groups have exactly
one selected child, or groups at least one, and requires/excludes constraints
hold. Features play no role when their parent is unselected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Literal

from .errors import (
    DanglingConstraintEndpoint,
    DuplicateFeatureName,
    GroupTooSmall,
    InvalidFeatureName,
    ModelTooLarge,
    SelfConstraint,
    UnknownFeature,
)

Configuration = frozenset[str]

MANDATORY: Literal["mandatory"] = "mandatory"
OPTIONAL: Literal["optional"] = "optional"
XOR: Literal["xor"] = "xor"
OR: Literal["or"] = "or"
REQUIRES: Literal["requires"] = "requires"
EXCLUDES: Literal["excludes"] = "excludes"
GLOBAL: Literal["global"] = "global"
LOCAL: Literal["local"] = "local"

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Feature:
    """One node of a feature tree.

    Children of a grouped feature are always optional: the group decides how
    many of them a configuration may pick, so a per-child kind is meaningless.
    The root's own kind is likewise meaningless (the root is always selected).
    """

    name: str
    kind: Literal["mandatory", "optional"] = OPTIONAL
    group: Literal["xor", "or"] | None = None
    abstract: bool = False
    children: tuple[Feature, ...] = ()


@dataclass(frozen=True)
class CrossTreeConstraint:
    kind: Literal["requires", "excludes"]
    lhs: str
    rhs: str


def mandatory(name: str, *children: Feature,
              group: Literal["xor", "or"] | None = None,
              abstract: bool = False) -> Feature:
    return Feature(name, MANDATORY, group, abstract, tuple(children))


def optional(name: str, *children: Feature,
             group: Literal["xor", "or"] | None = None,
             abstract: bool = False) -> Feature:
    return Feature(name, OPTIONAL, group, abstract, tuple(children))


def requires(lhs: str, rhs: str) -> CrossTreeConstraint:
    return CrossTreeConstraint(REQUIRES, lhs, rhs)


def excludes(lhs: str, rhs: str) -> CrossTreeConstraint:
    return CrossTreeConstraint(EXCLUDES, lhs, rhs)


@dataclass(frozen=True)
class FeatureModel:
    """A validated feature tree plus cross-tree constraints.

    Instances come from build_feature_model, which enforces the structural
    invariants; the derived lookup tables below assume them.
    """

    root: Feature
    constraints: tuple[CrossTreeConstraint, ...] = ()
    model_kind: Literal["global", "local"] = GLOBAL
    name: str = ""

    @cached_property
    def by_name(self) -> dict[str, Feature]:
        return {f.name: f for f in self.iter_features()}

    @cached_property
    def parent_name(self) -> dict[str, str | None]:
        parents: dict[str, str | None] = {self.root.name: None}
        for f in self.iter_features():
            for c in f.children:
                parents[c.name] = f.name
        return parents

    @cached_property
    def feature_names(self) -> frozenset[str]:
        return frozenset(self.by_name)

    def iter_features(self) -> Iterator[Feature]:
        """Yield every feature in preorder."""
        stack = [self.root]
        while stack:
            f = stack.pop()
            yield f
            stack.extend(reversed(f.children))

    def feature(self, name: str) -> Feature:
        try:
            return self.by_name[name]
        except KeyError:
            raise UnknownFeature(
                f"model {self.name or self.root.name!r} has no feature {name!r}"
            ) from None

    def subtree_names(self, name: str) -> frozenset[str]:
        """Names of the feature and every descendant."""
        sub = FeatureModel(self.feature(name))
        return sub.feature_names

    def __contains__(self, name: object) -> bool:
        return name in self.by_name


def build_feature_model(root: Feature,
                        constraints: tuple[CrossTreeConstraint, ...] | list[CrossTreeConstraint] = (),
                        model_kind: Literal["global", "local"] = GLOBAL,
                        name: str = "") -> FeatureModel:
    """Validate a feature tree and constraints into a FeatureModel.

    Enforces: syntactically valid and model-wide unique feature names, xor/or
    groups with at least two children, constraint endpoints that exist and
    differ. Children of grouped features are normalized to optional kind, and
    the root to mandatory, since group and root semantics supersede per-node
    kinds.
    """
    root = _normalize(root, is_root=True)
    seen: set[str] = set()
    stack = [root]
    while stack:
        f = stack.pop()
        if not _NAME_RE.match(f.name):
            raise InvalidFeatureName(f"invalid feature name {f.name!r}")
        if f.name in seen:
            raise DuplicateFeatureName(f"duplicate feature name {f.name!r}")
        seen.add(f.name)
        if f.group is not None and len(f.children) < 2:
            raise GroupTooSmall(
                f"{f.group} group {f.name!r} has {len(f.children)} children, needs at least 2")
        stack.extend(f.children)

    constraints = tuple(constraints)
    for ct in constraints:
        if ct.lhs == ct.rhs:
            raise SelfConstraint(f"constraint {ct.kind} relates {ct.lhs!r} to itself")
        for endpoint in (ct.lhs, ct.rhs):
            if endpoint not in seen:
                raise DanglingConstraintEndpoint(
                    f"constraint endpoint {endpoint!r} is not a feature of the model")

    return FeatureModel(root, constraints, model_kind, name or root.name)


def _normalize(f: Feature, *, is_root: bool = False, in_group: bool = False) -> Feature:
    kind = MANDATORY if is_root else (OPTIONAL if in_group else f.kind)
    children = tuple(_normalize(c, in_group=f.group is not None) for c in f.children)
    if kind == f.kind and children == f.children:
        return f
    return Feature(f.name, kind, f.group, f.abstract, children)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuleViolation:
    rule: str
    features: tuple[str, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[RuleViolation, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def validate_configuration(fm: FeatureModel, selected: Configuration | set[str]) -> ValidationReport:
    """Check a configuration against the model, reporting every violated rule.

    Raises UnknownFeature if the selection names features outside the model;
    an unknown name is a usage error, not an invalid configuration.
    """
    selected = frozenset(selected)
    unknown = selected - fm.feature_names
    if unknown:
        raise UnknownFeature(
            "selection names unknown features: " + ", ".join(sorted(unknown)))

    violations: list[RuleViolation] = []

    if fm.root.name not in selected:
        violations.append(RuleViolation(
            "root-missing", (fm.root.name,),
            f"root feature {fm.root.name!r} is not selected"))

    for name in sorted(selected):
        parent = fm.parent_name[name]
        if parent is not None and parent not in selected:
            violations.append(RuleViolation(
                "parent-missing", (name, parent),
                f"{name!r} is selected but its parent {parent!r} is not"))

    for f in fm.iter_features():
        if f.name not in selected:
            continue
        if f.group is None:
            for c in f.children:
                if c.kind == MANDATORY and c.name not in selected:
                    violations.append(RuleViolation(
                        "mandatory-missing", (f.name, c.name),
                        f"mandatory child {c.name!r} of selected {f.name!r} is not selected"))
        else:
            picked = tuple(c.name for c in f.children if c.name in selected)
            if f.group == XOR and len(picked) != 1:
                violations.append(RuleViolation(
                    "xor-violation", (f.name,) + picked,
                    f"xor group {f.name!r} has {len(picked)} selected children, needs exactly 1"))
            elif f.group == OR and not picked:
                violations.append(RuleViolation(
                    "or-violation", (f.name,),
                    f"or group {f.name!r} has no selected children, needs at least 1"))

    for ct in fm.constraints:
        if ct.kind == REQUIRES and ct.lhs in selected and ct.rhs not in selected:
            violations.append(RuleViolation(
                "requires-violation", (ct.lhs, ct.rhs),
                f"{ct.lhs!r} requires {ct.rhs!r}, which is not selected"))
        elif ct.kind == EXCLUDES and ct.lhs in selected and ct.rhs in selected:
            violations.append(RuleViolation(
                "excludes-violation", (ct.lhs, ct.rhs),
                f"{ct.lhs!r} excludes {ct.rhs!r}, both are selected"))

    return ValidationReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

def enumerate_configurations(fm: FeatureModel, max_features: int = 20) -> list[Configuration]:
    """All valid configurations, by brute force over every feature subset.

    Validity is re-derived here directly from the tree semantics instead of
    delegating to validate_configuration, so the two routes check each other.
    Deterministic: the result is sorted by the sorted feature-name tuple.
    """
    names = sorted(fm.feature_names)
    if len(names) > max_features:
        raise ModelTooLarge(
            f"model has {len(names)} features, enumeration capped at {max_features}")

    found: list[Configuration] = []
    for bits in range(1 << len(names)):
        subset = frozenset(n for i, n in enumerate(names) if bits >> i & 1)
        if _satisfies(fm, subset):
            found.append(subset)
    found.sort(key=sorted)
    return found


def _satisfies(fm: FeatureModel, sel: frozenset[str]) -> bool:
    if fm.root.name not in sel:
        return False
    for f in fm.iter_features():
        here = f.name in sel
        if f.group is None:
            for c in f.children:
                if c.name in sel and not here:
                    return False
                if here and c.kind == MANDATORY and c.name not in sel:
                    return False
        else:
            count = 0
            for c in f.children:
                if c.name in sel:
                    if not here:
                        return False
                    count += 1
            if here and f.group == XOR and count != 1:
                return False
            if here and f.group == OR and count == 0:
                return False
    for ct in fm.constraints:
        if ct.kind == REQUIRES:
            if ct.lhs in sel and ct.rhs not in sel:
                return False
        else:
            if ct.lhs in sel and ct.rhs in sel:
                return False
    return True


# ---------------------------------------------------------------------------
# Closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosureStep:
    """Why a feature entered a closed selection."""

    cause: Literal["seed", "root", "parent", "mandatory", "requires"]
    of: str | None = None


def close_selection(fm: FeatureModel, seeds: Configuration | set[str]) -> Configuration:
    """Smallest superset of the seeds (plus the root) closed under parent
    inclusion, mandatory-child inclusion, and requires propagation.

    xor/or cardinalities and excludes constraints are not solved here; closing
    does not guarantee validity, so re-validate the result.
    """
    return close_selection_traced(fm, seeds)[0]


def close_selection_traced(
        fm: FeatureModel,
        seeds: Configuration | set[str]) -> tuple[Configuration, dict[str, ClosureStep]]:
    """close_selection plus, per feature, the first rule that pulled it in."""
    seeds = frozenset(seeds)
    unknown = seeds - fm.feature_names
    if unknown:
        raise UnknownFeature(
            "seed names unknown features: " + ", ".join(sorted(unknown)))

    steps: dict[str, ClosureStep] = {}
    for s in sorted(seeds):
        steps[s] = ClosureStep("seed")
    if fm.root.name not in steps:
        steps[fm.root.name] = ClosureStep("root")

    changed = True
    while changed:
        changed = False
        for name in sorted(steps):
            parent = fm.parent_name[name]
            if parent is not None and parent not in steps:
                steps[parent] = ClosureStep("parent", name)
                changed = True
        for f in fm.iter_features():
            if f.name in steps and f.group is None:
                for c in f.children:
                    if c.kind == MANDATORY and c.name not in steps:
                        steps[c.name] = ClosureStep("mandatory", f.name)
                        changed = True
        for ct in fm.constraints:
            if ct.kind == REQUIRES and ct.lhs in steps and ct.rhs not in steps:
                steps[ct.rhs] = ClosureStep("requires", ct.lhs)
                changed = True

    return frozenset(steps), steps
