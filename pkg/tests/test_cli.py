import json
from fractions import Fraction
from pathlib import Path

import pytest

from hyperpack.cli import _fmt, main, parse_report, render_report
from hyperpack.hgraph import parse_khg

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_human(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("  ")
        out[key.rstrip()] = value.lstrip()
    return out


class TestReportFormat:
    FIELDS = {
        "verdict": "YES",
        "delta": Fraction(3, 5),
        "whole": Fraction(4, 1),
        "flag": True,
        "off": False,
        "missing": None,
        "vec": (5, 7),
        "vecs": ((0, 3), (2, 1)),
        "counts": (((0, 3), 35), ((2, 1), 70)),
        "empty": (),
        "n": 12,
    }

    def test_fmt_values(self):
        assert _fmt(self.FIELDS["delta"]) == "3/5"
        assert _fmt(self.FIELDS["whole"]) == "4"
        assert _fmt(True) == "true" and _fmt(False) == "false"
        assert _fmt(None) == "-"
        assert _fmt((5, 7)) == "5,7"
        assert _fmt(((0, 3), (2, 1))) == "0,3|2,1"
        assert _fmt((((0, 3), 35), ((2, 1), 70))) == "0,3:35|2,1:70"
        assert _fmt(()) == "()"

    def test_machine_round_trip(self):
        parsed = parse_report(render_report(self.FIELDS))
        assert parsed == {k: _fmt(v) for k, v in self.FIELDS.items()}

    def test_human_and_machine_carry_identical_fields(self):
        machine = parse_report(render_report(self.FIELDS, human=False))
        human = parse_human(render_report(self.FIELDS, human=True))
        assert machine == human

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_report("no separator here\n")


class TestDecidePmCommand:
    def test_complete_yes(self, capsys):
        code, out, _ = run(
            capsys, "decide-pm", str(CORPUS / "complete_12_3.khg"), "--delta", "3/5"
        )
        assert code == 0
        report = parse_report(out)
        assert report["verdict"] == "YES"
        assert report["agreement"] == "true"

    def test_barrier_no_residue(self, capsys):
        code, out, _ = run(
            capsys,
            "decide-pm", str(CORPUS / "h1_12_5.khg"), "--l", "2", "--delta", "0.4",
        )
        assert code == 1
        report = parse_report(out)
        assert report["verdict"] == "NO"
        assert report["cert_kind"] == "residue-obstruction"
        assert report["cert_residue_id"] == "1"
        assert report["oracle"] == "NO"
        assert report["agreement"] == "true"

    def test_precondition_exit_two(self, capsys):
        code, out, _ = run(
            capsys, "decide-pm", str(CORPUS / "h2_9_2.khg"), "--delta", "2/5"
        )
        assert code == 2
        report = parse_report(out)
        assert report["verdict"] == "PRECONDITION_UNMET"
        assert report["agreement"] == "skipped"

    def test_no_oracle_skips_cross_check(self, capsys):
        code, out, _ = run(
            capsys,
            "decide-pm", str(CORPUS / "complete_12_3.khg"),
            "--delta", "3/5", "--no-oracle",
        )
        assert code == 0
        report = parse_report(out)
        assert report["oracle"] == "-"
        assert report["agreement"] == "skipped"
        assert "time_oracle" not in report

    def test_human_flag_same_fields(self, capsys):
        args = ["decide-pm", str(CORPUS / "h1_12_5.khg"), "--delta", "2/5"]
        _, machine_out, _ = run(capsys, *args)
        _, human_out, _ = run(capsys, *args, "--human")
        machine = parse_report(machine_out)
        human = parse_human(human_out)
        drop = lambda d: {k: v for k, v in d.items() if not k.startswith("time_")}
        assert drop(machine) == drop(human)


class TestDecidePackCommand:
    def test_graph_yes(self, capsys):
        code, out, _ = run(
            capsys,
            "decide-pack", str(CORPUS / "k12_graph.khg"),
            "--pattern", "P3", "--delta", "1/2",
        )
        assert code == 0
        assert parse_report(out)["verdict"] == "YES"

    def test_graph_residue_no(self, capsys):
        code, out, _ = run(
            capsys,
            "decide-pack", str(CORPUS / "cliques_7_8.khg"),
            "--pattern", "P3", "--delta", "19/50",
        )
        assert code == 1
        report = parse_report(out)
        assert report["cert_kind"] == "residue-obstruction"
        assert report["agreement"] == "true"

    def test_partite_yes(self, capsys):
        code, out, _ = run(
            capsys,
            "decide-pack", str(CORPUS / "k8_3.khg"),
            "--pattern", "Kkpartite:1,1,2", "--delta", "1/2",
        )
        assert code == 0

    def test_single_edge_routes_to_pm(self, capsys):
        code, out, _ = run(
            capsys,
            "decide-pack", str(CORPUS / "complete_12_3.khg"),
            "--pattern", "edge:3", "--delta", "3/5",
        )
        assert code == 0
        assert "l" in parse_report(out)  # a matching-pipeline parameter


class TestPartitionLatticeFlow:
    def test_pipe_partition_into_lattice(self, capsys, tmp_path):
        part_file = tmp_path / "part.txt"
        code, out, _ = run(
            capsys,
            "partition", str(CORPUS / "h1_12_5.khg"),
            "--pattern", "edge:3", "--c-cap", "2", "--delta-prime", "1/20",
            "-o", str(part_file),
        )
        assert code == 0
        assert parse_report(out)["r"] == "2"
        body = part_file.read_text()
        assert "0 1 2 3 4" in body and "# r=2" in body

        code, out, _ = run(
            capsys,
            "lattice", str(CORPUS / "h1_12_5.khg"),
            "--pattern", "edge:3", "--partition", str(part_file),
        )
        assert code == 0
        report = parse_report(out)
        assert report["i_mu"] == "0,3|2,1"
        assert report["vector_counts"] == "0,3:35|2,1:70"
        assert report["hnf_basis"] == "2,1|0,3"
        assert report["q_order"] == "2"
        assert report["index_vector_v"] == "5,7"
        assert report["residue_id"] == "1"

    def test_partition_stdout_is_valid_lattice_input(self, capsys, tmp_path):
        code, out, _ = run(
            capsys,
            "partition", str(CORPUS / "cliques_6_6.khg"),
            "--pattern", "P3", "--c-cap", "3", "--delta-prime", "1/3",
        )
        assert code == 0
        fed = tmp_path / "fed.txt"
        fed.write_text(out)
        code, out, _ = run(
            capsys,
            "lattice", str(CORPUS / "cliques_6_6.khg"),
            "--pattern", "P3", "--partition", str(fed),
        )
        assert code == 0
        assert parse_report(out)["q_order"] == "3"

    def test_partition_precondition_reports(self, capsys, tmp_path):
        bad = tmp_path / "isolated.khg"
        bad.write_text("3 7\n0 1 2\n3 4 5\n")
        code, out, _ = run(
            capsys,
            "partition", str(bad),
            "--pattern", "edge:3", "--c-cap", "2", "--delta-prime", "1/7",
        )
        assert code == 2
        report = parse_report(out)
        assert report["verdict"] == "PRECONDITION_UNMET"
        assert report["cert_kind"] == "partition-precondition"


class TestGenCommand:
    def test_spec_example_flow(self, capsys, tmp_path):
        khg = tmp_path / "x.khg"
        code, _, _ = run(
            capsys,
            "gen", "div-barrier", "--n", "12", "--k", "3", "--a", "5",
            "-o", str(khg),
        )
        assert code == 0
        code, out, _ = run(
            capsys, "decide-pm", str(khg), "--l", "2", "--delta", "0.4"
        )
        assert code == 1
        assert parse_report(out)["cert_kind"] == "residue-obstruction"

    def test_stdout_is_khg(self, capsys):
        code, out, _ = run(
            capsys, "gen", "space-barrier", "--n", "9", "--k", "3", "--core", "2"
        )
        assert code == 0
        h = parse_khg(out)
        assert (h.k, h.n, len(h.edges)) == (3, 9, 49)

    def test_reduction_via_files(self, capsys, tmp_path):
        src = tmp_path / "lin.khg"
        src.write_text("3 6\n0 1 2\n3 4 5\n")
        out_file = tmp_path / "up.khg"
        code, out, _ = run(
            capsys, "gen", "lin-uplift", "--in", str(src), "-o", str(out_file)
        )
        assert code == 0
        report = parse_report(out)
        assert report["n"] == "32" and report["k"] == "4" and report["edges"] == "10"
        up = parse_khg(out_file.read_text())
        assert up.n == 32

    def test_degree_pad_reports_layout(self, capsys, tmp_path):
        src = tmp_path / "tiny.khg"
        src.write_text("3 3\n0 1 2\n")
        code, out, _ = run(
            capsys,
            "gen", "degree-pad", "--in", str(src),
            "--pattern", "edge:3", "--gamma", "1/4",
        )
        # no -o: the instance itself goes to stdout
        assert code == 0
        h = parse_khg(out)
        assert h.n == 3 + 3 * 12

    def test_missing_flag_is_usage_error(self, capsys):
        code, _, err = run(capsys, "gen", "div-barrier", "--n", "12", "--k", "3")
        assert code == 3
        assert "requires --a" in err


class TestOracleCommand:
    def test_no_instance(self, capsys):
        code, out, _ = run(
            capsys, "oracle", str(CORPUS / "h1_12_5.khg"), "--pattern", "edge:3"
        )
        assert code == 1
        assert parse_report(out)["verdict"] == "NO"

    def test_yes_instance(self, capsys):
        code, out, _ = run(
            capsys, "oracle", str(CORPUS / "complete_9_3.khg"), "--pattern", "edge:3"
        )
        assert code == 0
        assert parse_report(out)["verdict"] == "YES"

    def test_cap_refusal_is_input_error(self, capsys):
        code, _, err = run(
            capsys,
            "oracle", str(CORPUS / "complete_9_3.khg"),
            "--pattern", "edge:3", "--oracle-cap", "6",
        )
        assert code == 3
        assert "error" in err


class TestCorpusCommand:
    def test_empty_manifest_passes(self, capsys, tmp_path):
        mf = tmp_path / "empty.json"
        mf.write_text(json.dumps({"instances": []}))
        code, out, _ = run(capsys, "corpus", str(mf))
        assert code == 0
        report = parse_report(out)
        assert report["instances"] == "0" and report["ok"] == "true"

    def test_fixture_manifest_full_agreement(self, capsys):
        code, out, _ = run(capsys, "corpus", str(CORPUS / "manifest.json"))
        assert code == 0
        report = parse_report(out)
        assert report["failures"] == "0"
        assert report["disagreements"] == "0"
        assert report["instances"] == "18"
        agreements = [
            v for k, v in report.items() if k.endswith(".agreement")
        ]
        assert agreements and all(v in ("true", "skipped") for v in agreements)

    def test_wrong_expectation_fails(self, capsys, tmp_path):
        mf = tmp_path / "wrong.json"
        mf.write_text(json.dumps({
            "instances": [{
                "name": "lie",
                "op": "decide-pm",
                "file": str(CORPUS / "complete_12_3.khg"),
                "params": {"delta": "3/5"},
                "expect": "NO",
            }]
        }))
        code, out, _ = run(capsys, "corpus", str(mf))
        assert code == 1
        report = parse_report(out)
        assert report["instance.lie.expect_ok"] == "false"
        assert report["failures"] == "1"

    def test_missing_manifest(self, capsys):
        code, _, err = run(capsys, "corpus", "nope.json")
        assert code == 3 and "no such file" in err


class TestUsageAndErrors:
    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["frobnicate"])
        assert ei.value.code == 3

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["decide-pm", "x.khg"])  # --delta is required
        assert ei.value.code == 3

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "decide-pm", "definitely-not-here.khg", "--delta", "1/2")
        assert code == 3 and "no such file" in err

    def test_malformed_khg(self, capsys, tmp_path):
        bad = tmp_path / "bad.khg"
        bad.write_text("3 6\n0 1\n")
        code, _, err = run(capsys, "decide-pm", str(bad), "--delta", "1/2")
        assert code == 3

    def test_bad_pattern_name(self, capsys):
        code, _, err = run(
            capsys,
            "decide-pack", str(CORPUS / "k12_graph.khg"),
            "--pattern", "Zork", "--delta", "1/2",
        )
        assert code == 3

    def test_bad_delta(self, capsys):
        code, _, err = run(
            capsys, "decide-pm", str(CORPUS / "complete_12_3.khg"), "--delta", "zero"
        )
        assert code == 3
