"""The lfc command line: exit codes, diagnostic format, emitted files."""

import io
import json
import re
import sys

import pytest

from localfeatures import verify_schema
from localfeatures.cli import _color_enabled, main, print_diagnostics
from localfeatures.resolver import Diagnostic

TOY_SPL = """\
FEATUREMODEL R {
    OPTIONAL A
    MANDATORY B XOR {
        C
        D
    }
}
"""

TWIN_BREAK_SPL = """\
VIEWPOINT data (Entity);

FEATUREMODEL G {
    MANDATORY W {
        OPTIONAL A
    }
}

FEATUREMODEL W {
}

LOCAL W APPLIED TO data.Entity;
"""


@pytest.fixture
def files(tmp_path, webeiel_source, gis_spl_source):
    (tmp_path / "webeiel.gis").write_text(webeiel_source, encoding="utf-8")
    (tmp_path / "gis.spl").write_text(gis_spl_source, encoding="utf-8")
    return tmp_path


def write(directory, name, text):
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# -- check ---------------------------------------------------------------------

def test_check_clean_product(files, capsys):
    rc = main(["check", str(files / "webeiel.gis"), "--spl", str(files / "gis.spl")])
    out, err = capsys.readouterr()
    assert rc == 0
    assert out == "0 errors, 0 warnings\n"
    assert err == ""


def test_check_reports_errors_on_stderr(files, capsys):
    bad = write(files, "bad.gis", "CREATE GIS X WITH FEATURES (Bogus);")
    rc = main(["check", bad, "--spl", str(files / "gis.spl")])
    out, err = capsys.readouterr()
    assert rc == 1
    assert out == "1 errors, 0 warnings\n"
    assert re.fullmatch(
        r".*bad\.gis:1:\d+: error\[unknown-feature\]: .+\n", err)


def test_check_counts_warnings_without_failing(files, capsys):
    spl = write(files, "warn.spl", (
        "VIEWPOINT data (Entity);\n"
        "FEATUREMODEL G {\n    OPTIONAL W {\n        MANDATORY M\n    }\n}\n"
        "FEATUREMODEL W {\n    MANDATORY M\n}\n"
        "LOCAL W APPLIED TO data.Entity;\n"))
    spec = write(files, "warn.gis", (
        "CREATE ENTITY E (id Long IDENTIFIER) WITH FEATURES ();\n"
        "CREATE GIS X;"))
    rc = main(["check", spec, "--spl", spl])
    out, err = capsys.readouterr()
    assert rc == 0
    assert out == "0 errors, 1 warnings\n"
    assert "warning[invalid-global-default]" in err


def test_check_json_format(files, capsys):
    bad = write(files, "bad.gis",
                "CREATE GIS X WITH FEATURES (Bogus, LeftMenu, TopMenu);")
    rc = main(["check", bad, "--spl", str(files / "gis.spl"), "--format", "json"])
    out, err = capsys.readouterr()
    assert rc == 1
    rows = json.loads(err)
    # Sorted by position: the product statement (column 1) precedes the clause.
    assert [r["code"] for r in rows] == ["invalid-global-selection",
                                         "unknown-feature"]
    assert set(rows[0]) == {"file", "line", "column", "severity", "code",
                            "message"}
    assert rows[0]["file"].endswith("bad.gis")


def test_check_json_format_stays_silent_when_clean(files, capsys):
    rc = main(["check", str(files / "webeiel.gis"),
               "--spl", str(files / "gis.spl"), "--format", "json"])
    out, err = capsys.readouterr()
    assert rc == 0 and err == ""


def test_check_missing_files(files, capsys):
    rc = main(["check", str(files / "nope.gis"), "--spl", str(files / "gis.spl")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err

    rc = main(["check", str(files / "webeiel.gis"), "--spl", str(files / "no.spl")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_check_reports_spec_syntax_errors(files, capsys):
    bad = write(files, "bad.gis", "CREATE GIS X WITH FEATURES (A");
    rc = main(["check", bad, "--spl", str(files / "gis.spl")])
    err = capsys.readouterr().err
    assert rc == 1
    assert "error[syntax]" in err
    assert "(expected" in err
    assert re.search(r"bad\.gis:1:\d+:", err)


def test_check_reports_spl_syntax_errors(files, capsys):
    bad = write(files, "bad.spl", "FEATUREMODEL {")
    rc = main(["check", str(files / "webeiel.gis"), "--spl", bad])
    err = capsys.readouterr().err
    assert rc == 1
    assert "bad.spl" in err and "error[syntax]" in err


def test_check_reports_definition_errors(files, capsys):
    bad = write(files, "twin.spl", TWIN_BREAK_SPL)
    rc = main(["check", str(files / "webeiel.gis"), "--spl", bad])
    err = capsys.readouterr().err
    assert rc == 1
    assert "error[definition]" in err
    assert "children of 'W' differ" in err


# -- emit ----------------------------------------------------------------------

def test_emit_writes_the_default_path_in_the_working_directory(
        files, capsys, monkeypatch):
    monkeypatch.chdir(files)
    rc = main(["emit", str(files / "webeiel.gis"), "--spl", str(files / "gis.spl")])
    out, err = capsys.readouterr()
    assert rc == 0
    assert out == "WebEIEL.derivation.json\n"
    first = (files / "WebEIEL.derivation.json").read_text(encoding="utf-8")
    assert verify_schema(first)

    rc = main(["emit", str(files / "webeiel.gis"), "--spl", str(files / "gis.spl")])
    assert rc == 0
    again = (files / "WebEIEL.derivation.json").read_text(encoding="utf-8")
    assert again == first


def test_emit_honors_out(files, capsys):
    target = files / "custom.json"
    rc = main(["emit", str(files / "webeiel.gis"), "--spl", str(files / "gis.spl"),
               "--out", str(target)])
    out, _ = capsys.readouterr()
    assert rc == 0
    assert out == f"{target}\n"
    assert json.loads(target.read_text(encoding="utf-8"))["product"] == "WebEIEL"


def test_emit_refuses_unwritable_directories(files, capsys):
    rc = main(["emit", str(files / "webeiel.gis"), "--spl", str(files / "gis.spl"),
               "--out", str(files / "missing" / "x.json")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_emit_leaves_no_file_behind_on_errors(files, capsys, monkeypatch):
    monkeypatch.chdir(files)
    bad = write(files, "bad.gis", "CREATE GIS Broken WITH FEATURES (Bogus);")
    rc = main(["emit", bad, "--spl", str(files / "gis.spl")])
    assert rc == 1
    assert not (files / "Broken.derivation.json").exists()
    assert not list(files.glob(".emit-*"))


# -- explain -------------------------------------------------------------------

def test_explain_prints_an_aligned_table(files, capsys):
    rc = main(["explain", str(files / "webeiel.gis"),
               "visualization.municipalitiesMap", "--spl", str(files / "gis.spl")])
    out, _ = capsys.readouterr()
    assert rc == 0
    header, row = out.splitlines()
    assert header.split() == ["FEATURE", "ORIGIN", "SOURCE"]
    assert re.fullmatch(
        r"MapFeature\s+global-default \(no binding exists\)\s+\S*webeiel\.gis:40:1",
        row)
    assert header.index("SOURCE") == row.index(str(files / "webeiel.gis"))


def test_explain_lists_bound_features(files, capsys):
    rc = main(["explain", str(files / "webeiel.gis"), "data.Municipality",
               "--spl", str(files / "gis.spl")])
    out, _ = capsys.readouterr()
    lines = out.splitlines()
    assert rc == 0
    assert len(lines) == 6  # header plus five features
    assert lines[1].startswith("EntityFeature")
    assert "local (bound local root)" in lines[1]
    assert all("webeiel.gis:" in line for line in lines[1:])


def test_explain_rejects_unknown_elements(files, capsys):
    rc = main(["explain", str(files / "webeiel.gis"), "data.Nope",
               "--spl", str(files / "gis.spl")])
    assert rc == 2
    assert "no covered element" in capsys.readouterr().err


# -- features --------------------------------------------------------------------

def test_features_lists_the_included_features(files, capsys, webeiel_resolved):
    rc = main(["features", str(files / "webeiel.gis"),
               "--spl", str(files / "gis.spl")])
    out, _ = capsys.readouterr()
    assert rc == 0
    assert out.splitlines() == list(webeiel_resolved.included)


def test_features_fails_on_errors(files, capsys):
    bad = write(files, "bad.gis", "CREATE GIS X WITH FEATURES (Bogus);")
    rc = main(["features", bad, "--spl", str(files / "gis.spl")])
    out, err = capsys.readouterr()
    assert rc == 1
    assert out == ""
    assert "unknown-feature" in err


# -- enumerate -------------------------------------------------------------------

def test_enumerate_prints_count_then_configurations(files, capsys):
    toy = write(files, "toy.spl", TOY_SPL)
    rc = main(["enumerate", "--spl", toy, "--model", "R"])
    out, _ = capsys.readouterr()
    assert rc == 0
    assert out.splitlines() == [
        "4", "A, B, C, R", "A, B, D, R", "B, C, R", "B, D, R"]


def test_enumerate_handles_local_models(files, capsys):
    rc = main(["enumerate", "--spl", str(files / "gis.spl"),
               "--model", "EntityFeature"])
    out, _ = capsys.readouterr()
    lines = out.splitlines()
    assert rc == 0
    assert lines[0] == "23"
    assert len(lines) == 24
    assert all("EntityFeature" in line for line in lines[1:])


def test_enumerate_rejects_unknown_models(files, capsys):
    rc = main(["enumerate", "--spl", str(files / "gis.spl"), "--model", "Nope"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "GIS_SPL, EntityFeature, MapFeature, LayerFeature" in err


def test_enumerate_respects_the_size_cap(files, capsys):
    toy = write(files, "toy.spl", TOY_SPL)
    rc = main(["enumerate", "--spl", toy, "--model", "R", "--max", "3"])
    assert rc == 2
    assert "enumeration capped" in capsys.readouterr().err


def test_enumerate_requires_a_readable_definition(files, capsys):
    rc = main(["enumerate", "--spl", str(files / "no.spl"), "--model", "R"])
    assert rc == 2


# -- color ----------------------------------------------------------------------

class FakeTty(io.StringIO):
    def isatty(self):
        return True


def test_color_enabled_only_on_a_tty_without_no_color(monkeypatch):
    monkeypatch.setattr(sys, "stderr", FakeTty())
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert _color_enabled()
    monkeypatch.setenv("NO_COLOR", "1")
    assert not _color_enabled()
    monkeypatch.setattr(sys, "stderr", io.StringIO())
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert not _color_enabled()


def test_diagnostics_are_colored_on_a_tty(monkeypatch):
    fake = FakeTty()
    monkeypatch.setattr(sys, "stderr", fake)
    monkeypatch.delenv("NO_COLOR", raising=False)
    print_diagnostics((Diagnostic("error", "x", "boom"),), "text")
    print_diagnostics((Diagnostic("warning", "y", "careful"),), "text")
    text = fake.getvalue()
    assert "\x1b[31merror\x1b[0m[x]" in text
    assert "\x1b[33mwarning\x1b[0m[y]" in text


def test_diagnostics_are_plain_when_no_color_is_set(monkeypatch):
    fake = FakeTty()
    monkeypatch.setattr(sys, "stderr", fake)
    monkeypatch.setenv("NO_COLOR", "1")
    print_diagnostics((Diagnostic("error", "x", "boom"),), "text")
    assert fake.getvalue() == "<spec>:1:1: error[x]: boom\n"
