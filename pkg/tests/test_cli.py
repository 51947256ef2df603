from __future__ import annotations

import json

import pytest

from regrank import boolfn
from regrank.cli import main
from regrank.graph import Graph
from regrank.matrix import BoolMatrix, complement, serialize_matrix


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def files(tmp_path):
    f = {
        "cI3": write(tmp_path / "ci3.txt", serialize_matrix(complement(BoolMatrix.identity(3)))),
        "I3": write(tmp_path / "i3.txt", serialize_matrix(BoolMatrix.identity(3))),
        "nonreg": write(tmp_path / "nonreg.txt", "2 2\n11\n10\n"),
        "bad": write(tmp_path / "bad.txt", "2 2\n1x\n10\n"),
        "K4": write(tmp_path / "k4.json", Graph.complete(4).dumps() + "\n"),
        "and2": write(tmp_path / "and2.tt", boolfn.serialize_truth_table(boolfn.and_fn(2))),
        "xor3": write(tmp_path / "xor3.tt", boolfn.serialize_truth_table(boolfn.xor_fn(3))),
    }
    f["dir"] = tmp_path
    return f


class TestSpecExamples:
    def test_boolean_rank_of_complement_identity(self, files, capsys):
        assert main(["rank", "--mode", "boolean", files["cI3"]]) == 0
        assert capsys.readouterr().out == "3\n"

    def test_gadget_disc(self, capsys):
        assert main(["gadget", "--ell", "1", "--check", "disc"]) == 0
        out = capsys.readouterr().out
        assert "discrepancy 1/4 (exact)" in out and "holds" in out

    def test_transform_non_regular(self, files, capsys):
        assert main(["transform", files["nonreg"], "-o", str(files["dir"] / "t.json")]) == 2
        assert "regular" in capsys.readouterr().err


class TestSubcommands:
    @pytest.mark.parametrize("mode,expected", [("real", "3"), ("binary", "3"), ("boolean", "3")])
    def test_rank_modes(self, files, capsys, mode, expected):
        assert main(["rank", "--mode", mode, files["cI3"]]) == 0
        assert capsys.readouterr().out.strip() == expected

    def test_rank_budget_exhausted(self, tmp_path, capsys):
        m = write(tmp_path / "ci5.txt", serialize_matrix(complement(BoolMatrix.identity(5))))
        assert main(["rank", "--mode", "binary", "--budget", "1", m]) == 1
        assert "upper bound" in capsys.readouterr().err

    def test_budget_zero_warns(self, files, capsys):
        assert main(["rank", "--mode", "boolean", "--budget", "0", files["cI3"]]) == 0
        assert "unlimited" in capsys.readouterr().err

    @pytest.mark.parametrize("check", ["unbiased", "disc", "lindsey"])
    def test_gadget_checks(self, check, capsys):
        for ell in (1, 2, 3):
            assert main(["gadget", "--ell", str(ell), "--check", check]) == 0

    def test_gadget_ip_is_not_unbiased(self, capsys):
        assert main(["gadget", "--ell", "2", "--name", "ip", "--check", "unbiased"]) == 1

    def test_compose(self, files):
        out = files["dir"] / "c.txt"
        assert main(["compose", "--f", files["and2"], "--gadget", "gl", "--ell", "1", "-o", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "4 4"

    def test_boolfn_measures(self, files, capsys):
        assert main(["boolfn", "measures", files["xor3"]]) == 0
        assert json.loads(capsys.readouterr().out) == {"C0": 3, "C1": 3, "UC1": 3}

    def test_boolfn_gap(self, capsys):
        assert main(["boolfn", "gap", "--n", "2"]) == 0
        res = json.loads(capsys.readouterr().out)
        assert res["gap"] == 0 and res["complete"] is True

    def test_graph(self, files, capsys):
        assert main(["graph", "chi", files["K4"]]) == 0
        assert main(["graph", "bp", files["K4"]]) == 0
        assert capsys.readouterr().out.split() == ["4", "3"]

    def test_gen(self, files):
        out = files["dir"] / "g.txt"
        assert main(["gen", "--n", "6", "--d", "2", "--seed", "3", "-o", str(out)]) == 0
        rows = out.read_text().split()[2:]
        assert all(r.count("1") == 2 for r in rows)

    def test_entropy(self, capsys):
        assert main(["entropy", "min-entropy", "--n", "2", "--z", "00"]) == 0
        assert json.loads(capsys.readouterr().out) == {"bits": 2.0, "max_prob": "1/4"}
        assert main(["entropy", "dense", "--n", "2", "--z", "00", "--delta", "3/5"]) == 0
        assert json.loads(capsys.readouterr().out) == {"dense": False, "witness": [1]}
        assert main(["entropy", "gap", "--n", "1", "--z", "1"]) == 0
        assert json.loads(capsys.readouterr().out) == {"S": [1], "gap": "1/2"}
        assert main(["entropy", "restrict", "--n", "2", "--z", "00", "--delta", "1/2"]) == 0
        assert json.loads(capsys.readouterr().out)["fixed"] == []

    def test_entropy_bad_delta(self):
        assert main(["entropy", "dense", "--n", "1", "--z", "0", "--delta", "x"]) == 2
        assert main(["entropy", "dense", "--n", "1", "--z", "0"]) == 2


class TestRoundTrips:
    def test_rank_certificates(self, files):
        for mode in ("binary", "boolean"):
            cert = files["dir"] / f"{mode}.json"
            assert main(["rank", "--mode", mode, files["cI3"], "--cert", str(cert)]) == 0
            assert main(["verify", "--what", "rectangles", files["cI3"], str(cert)]) == 0

    def test_bp_certificate(self, files):
        cert = files["dir"] / "bp.json"
        assert main(["graph", "bp", files["K4"], "--cert", str(cert)]) == 0
        assert main(["verify", "--what", "covering", files["K4"], str(cert)]) == 0

    def test_lift_partition(self, files):
        dnf = files["dir"] / "and2.dnf"
        assert main(["boolfn", "measures", files["and2"], "--dnf", str(dnf)]) == 0
        M, P = files["dir"] / "m.txt", files["dir"] / "p.json"
        for ell in ("1", "2"):
            assert main(["compose", "--f", files["and2"], "--gadget", "gl", "--ell", ell, "-o", str(M)]) == 0
            assert main(["lift-partition", "--dnf", str(dnf), "--gadget", "gl", "--ell", ell, "-o", str(P)]) == 0
            assert main(["verify", "--what", "rectangles", str(M), str(P)]) == 0

    def test_transform(self, files, capsys):
        out = files["dir"] / "t.json"
        assert main(["transform", files["cI3"], "-o", str(out)]) == 0
        assert main(["verify", "--what", "transform", files["cI3"], str(out)]) == 0
        assert "FAIL" not in capsys.readouterr().out
        assert main(["verify", "--what", "transform", "--no-rank-check", files["cI3"], str(out)]) == 0

    def test_wrong_matrix_fails(self, files):
        cert = files["dir"] / "r.json"
        assert main(["rank", "--mode", "binary", files["cI3"], "--cert", str(cert)]) == 0
        assert main(["verify", "--what", "rectangles", files["I3"], str(cert)]) == 1


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["gen", "--n", "8", "--d", "3", "--seed", "11"],
        ["transform", "CI3"],
        ["rank", "--mode", "binary", "CI3", "--cert"],
        ["graph", "bp", "K4", "--cert"],
    ])
    def test_byte_identical(self, files, argv):
        outs = []
        for i in range(2):
            target = files["dir"] / f"out{i}"
            args = [files["cI3"] if a == "CI3" else files["K4"] if a == "K4" else a for a in argv]
            if args[-1] != "--cert":
                args.append("-o")
            args.append(str(target))
            assert main(args) == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1] and outs[0]

    def test_canonical_json(self, files):
        cert = files["dir"] / "bp.json"
        main(["graph", "bp", files["K4"], "--cert", str(cert)])
        text = cert.read_text()
        data = json.loads(text)
        assert text == json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


class TestErrors:
    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 2

    def test_no_subcommand(self):
        assert main([]) == 2

    def test_malformed_matrix(self, files, capsys):
        assert main(["rank", "--mode", "real", files["bad"]]) == 2
        assert "line" in capsys.readouterr().err

    def test_missing_file(self, files):
        assert main(["rank", "--mode", "real", str(files["dir"] / "nope.txt")]) == 2

    def test_malformed_json(self, files, tmp_path):
        bad = write(tmp_path / "bad.json", "{not json")
        assert main(["graph", "chi", bad]) == 2
        assert main(["verify", "--what", "covering", files["K4"], bad]) == 2
        assert main(["verify", "--what", "rectangles", files["cI3"], bad]) == 2

    def test_malformed_truth_table(self, tmp_path):
        bad = write(tmp_path / "bad.tt", "2\n01\n")
        assert main(["boolfn", "measures", bad]) == 2

    def test_verify_arity(self, files):
        assert main(["verify", "--what", "rectangles", files["cI3"]]) == 2

    def test_transform_bad_m(self, files, tmp_path):
        assert main(["transform", files["cI3"], "--m", "0", "-o", str(tmp_path / "x.json")]) == 2
