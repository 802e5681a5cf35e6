"""Exit codes, output files, and the no-partial-output guarantee."""

import json

from ontomerge import model_io
from ontomerge.cli import main

from .conftest import make_conflicting_components, make_contradictory_od


def _integrate_args(paths, out_dir):
    return [
        "integrate",
        "--component", str(paths["cm1"]),
        "--component", str(paths["cm2"]),
        "--ontology", str(paths["od"]),
        "--out-component", str(out_dir / "cmr.json"),
        "--out-ontology", str(out_dir / "od2.json"),
        "--report", str(out_dir / "report.json"),
    ]


def test_integrate_writes_three_files(tmp_path, scenario_files, capsys):
    code = main(_integrate_args(scenario_files, tmp_path))
    assert code == 0
    for name in ("cmr.json", "od2.json", "report.json"):
        assert (tmp_path / name).exists()
    merged = model_io.parse_component(tmp_path / "cmr.json")
    assert len(merged.entities) == 3
    report = model_io.parse_report(tmp_path / "report.json")
    assert {c.verdict for c in report.correspondences} == {
        "Synonym", "Homonym", "Distinct",
    }


def test_missing_ontology_flag_is_usage_error(tmp_path, scenario_files, capsys):
    code = main([
        "integrate",
        "--component", str(scenario_files["cm1"]),
        "--component", str(scenario_files["cm2"]),
        "--out-component", str(tmp_path / "a.json"),
        "--out-ontology", str(tmp_path / "b.json"),
        "--report", str(tmp_path / "c.json"),
    ])
    assert code == 1
    assert "usage" in capsys.readouterr().err


def test_single_component_is_usage_error(tmp_path, scenario_files, capsys):
    code = main([
        "integrate",
        "--component", str(scenario_files["cm1"]),
        "--ontology", str(scenario_files["od"]),
        "--out-component", str(tmp_path / "a.json"),
        "--out-ontology", str(tmp_path / "b.json"),
        "--report", str(tmp_path / "c.json"),
    ])
    assert code == 1


def test_duplicate_output_paths_rejected(tmp_path, scenario_files, capsys):
    code = main([
        "integrate",
        "--component", str(scenario_files["cm1"]),
        "--component", str(scenario_files["cm2"]),
        "--ontology", str(scenario_files["od"]),
        "--out-component", str(tmp_path / "same.json"),
        "--out-ontology", str(tmp_path / "same.json"),
        "--report", str(tmp_path / "c.json"),
    ])
    assert code == 1
    assert not (tmp_path / "same.json").exists()


def test_bad_tau_is_usage_error(tmp_path, scenario_files, capsys):
    args = _integrate_args(scenario_files, tmp_path) + ["--tau", "0"]
    assert main(args) == 1


def test_broken_input_is_schema_error(tmp_path, scenario_files, capsys):
    scenario_files["cm1"].write_text("{broken", encoding="utf-8")
    code = main(_integrate_args(scenario_files, tmp_path))
    assert code == 2
    assert not (tmp_path / "cmr.json").exists()


def test_collision_is_exit_three(tmp_path, capsys):
    left, right = make_conflicting_components()
    od = make_contradictory_od()
    paths = {
        "cm1": tmp_path / "l.json",
        "cm2": tmp_path / "r.json",
        "od": tmp_path / "od.json",
    }
    paths["cm1"].write_bytes(model_io.serialize_component(left))
    paths["cm2"].write_bytes(model_io.serialize_component(right))
    paths["od"].write_bytes(model_io.serialize_ontology(od))
    code = main(_integrate_args(paths, tmp_path))
    assert code == 3
    for name in ("cmr.json", "od2.json", "report.json"):
        assert not (tmp_path / name).exists()


def test_unwritable_output_leaves_no_partial_files(tmp_path, scenario_files, capsys):
    out = tmp_path / "ok"
    out.mkdir()
    args = [
        "integrate",
        "--component", str(scenario_files["cm1"]),
        "--component", str(scenario_files["cm2"]),
        "--ontology", str(scenario_files["od"]),
        "--out-component", str(out / "cmr.json"),
        "--out-ontology", str(tmp_path / "missing-dir" / "od2.json"),
        "--report", str(out / "report.json"),
    ]
    code = main(args)
    assert code != 0
    assert list(out.iterdir()) == []  # nothing written, not even temporaries


def test_repeated_runs_are_byte_identical(tmp_path, scenario_files):
    first = tmp_path / "first"
    second = tmp_path / "second"
    first.mkdir(), second.mkdir()
    assert main(_integrate_args(scenario_files, first)) == 0
    assert main(_integrate_args(scenario_files, second)) == 0
    for name in ("cmr.json", "od2.json", "report.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_align_writes_report_only(tmp_path, scenario_files, capsys):
    report_path = tmp_path / "alignment.json"
    code = main([
        "align",
        "--component", str(scenario_files["cm1"]),
        "--component", str(scenario_files["cm2"]),
        "--ontology", str(scenario_files["od"]),
        "--report", str(report_path),
    ])
    assert code == 0
    report = model_io.parse_report(report_path)
    assert report.correspondences
    assert not (tmp_path / "cmr.json").exists()


def test_gen_eval_round_trip(tmp_path, capsys):
    data = tmp_path / "scenario"
    code = main([
        "gen", "--out-dir", str(data),
        "--concepts", "20", "--synonym-pairs", "4", "--homonym-pairs", "2",
        "--od-coverage", "1.0", "--seed", "7",
    ])
    assert code == 0
    out = tmp_path / "run"
    out.mkdir()
    code = main([
        "integrate",
        "--component", str(data / "cm1.json"),
        "--component", str(data / "cm2.json"),
        "--ontology", str(data / "od.json"),
        "--out-component", str(out / "cmr.json"),
        "--out-ontology", str(out / "od2.json"),
        "--report", str(out / "report.json"),
    ])
    assert code == 0
    capsys.readouterr()  # drop the gen subcommand's status line
    code = main([
        "eval",
        "--report", str(out / "report.json"),
        "--truth", str(data / "truth.json"),
    ])
    assert code == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["synonym"]["recall"] == 1.0
    assert metrics["homonym"]["recall"] == 1.0


def test_gen_is_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main([
            "gen", "--out-dir", str(tmp_path / name), "--concepts", "12",
            "--synonym-pairs", "2", "--homonym-pairs", "1",
            "--od-coverage", "0.5", "--seed", "3",
        ]) == 0
    for name in ("cm1.json", "cm2.json", "od.json", "truth.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_gen_from_spec_file(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({
        "concept_count": 10, "synonym_pairs": 2, "homonym_pairs": 1,
        "od_coverage": 1.0, "rng_seed": 5,
    }), encoding="utf-8")
    assert main(["gen", "--out-dir", str(tmp_path / "s"), "--spec", str(spec_path)]) == 0
    assert (tmp_path / "s" / "truth.json").exists()


def test_infeasible_gen_spec_is_schema_error(tmp_path, capsys):
    code = main([
        "gen", "--out-dir", str(tmp_path / "x"),
        "--concepts", "4", "--synonym-pairs", "3", "--homonym-pairs", "0",
    ])
    assert code == 2


def test_unexpected_failure_is_internal_error(tmp_path, scenario_files, capsys, monkeypatch):
    import ontomerge.cli as cli_module

    def explode(*args, **kwargs):
        raise RuntimeError("simulated defect")

    monkeypatch.setattr(cli_module, "integrate", explode)
    code = main(_integrate_args(scenario_files, tmp_path))
    assert code == 4
    assert "internal error" in capsys.readouterr().err
    assert not (tmp_path / "cmr.json").exists()


def test_export_dot(tmp_path, scenario_files, capsys):
    code = main(["export-dot", "--ontology", str(scenario_files["od"])])
    assert code == 0
    payload = capsys.readouterr().out
    assert payload.startswith('digraph "Od"')
    assert 'label="synonymy"' in payload

    dot_path = tmp_path / "od.dot"
    assert main([
        "export-dot", "--ontology", str(scenario_files["od"]), "--out", str(dot_path),
    ]) == 0
    assert dot_path.read_text(encoding="utf-8") == payload
