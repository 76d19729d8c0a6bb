import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netforge import netfile
from netforge.cli import main
from netforge.errors import MalformedInput
from netforge.points import NetPoints
from netforge.recursive import PermutationFamily, hammersley


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def hammersley_file(tmp_path):
    path = tmp_path / "h.json"
    path.write_text(netfile.emit(netfile.NetFile(hammersley(2, 3), 3, {"algorithm": "hammersley"})))
    return str(path)


@pytest.fixture
def dup_file(tmp_path):
    path = tmp_path / "dup.json"
    pts = NetPoints(2, 2, 2, ((0, 0), (0, 2), (2, 0), (2, 2)))
    path.write_text(netfile.emit(netfile.NetFile(pts, 2)))
    return str(path)


class TestConstruct:
    def test_hammersley(self, capsys):
        code, out, _ = run(capsys, "construct", "--algorithm", "hammersley", "--base", "2", "--m", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["version"] == 1 and doc["g"] == 2
        assert {tuple(p) for p in doc["points"]} == {(0, 0), (2, 1), (1, 2), (3, 3)}

    def test_greedy_seeded(self, capsys):
        argv = ["construct", "--algorithm", "greedy", "--base", "2", "--m", "3", "--policy", "random", "--seed", "7"]
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == 0 and out1 == out2
        assert len(json.loads(out1)["points"]) == 8

    def test_greedy_lex_three_dims(self, capsys):
        # the lexicographic run completes (fixed by running it)
        code, out, _ = run(capsys, "construct", "--algorithm", "greedy", "--base", "2", "--m", "2", "--s", "3")
        assert code == 0
        assert json.loads(out)["points"] == [[0, 0, 0], [1, 2, 2], [2, 1, 3], [3, 3, 1]]

    def test_stalled_exit(self, capsys, monkeypatch):
        from netforge import cli
        from netforge.greedy import Scripted, greedy_run

        stalled = greedy_run(2, 2, 3, Scripted([(0, 0, 0), (2, 2, 2)]))
        monkeypatch.setattr(cli, "greedy_run", lambda *a, **k: stalled)
        code, out, err = run(capsys, "construct", "--algorithm", "greedy", "--base", "2", "--m", "2", "--s", "3")
        assert code == 3 and out == ""
        report = json.loads(err)
        assert report["status"] == "stalled" and report["steps"] == 2

    def test_find_stalling_seed(self, capsys):
        # some seeded run in s=3 stalls; its exit code must be 3
        codes = set()
        for seed in range(40):
            code, _, _ = run(
                capsys, "construct", "--algorithm", "greedy", "--base", "2", "--m", "3", "--s", "3",
                "--policy", "random", "--seed", str(seed),
            )
            codes.add(code)
        assert codes <= {0, 3}
        assert 3 in codes

    def test_recursive_perms_file(self, capsys, tmp_path):
        fam = PermutationFamily.random(3, 2, 5)
        path = tmp_path / "perms.json"
        path.write_text(json.dumps(fam.to_json()))
        code, out, _ = run(capsys, "construct", "--algorithm", "recursive", "--base", "3", "--m", "2", "--perms", str(path))
        assert code == 0
        doc = json.loads(out)
        assert doc["provenance"]["permutations"] == fam.to_json()["levels"]

    def test_placement(self, capsys, tmp_path):
        out_path = tmp_path / "p.json"
        code, _, _ = run(
            capsys, "construct", "--algorithm", "hammersley", "--base", "2", "--m", "3",
            "--placement", "random:5", "--seed", "3", "--out", str(out_path),
        )
        assert code == 0
        assert json.loads(out_path.read_text())["g"] == 5
        code, _, _ = run(capsys, "verify", "--in", str(out_path), "--t", "0")
        assert code == 0

    @pytest.mark.parametrize(
        "argv",
        [
            ["construct", "--algorithm", "sobol", "--base", "2", "--m", "2"],
            ["construct", "--algorithm", "hammersley", "--base", "1", "--m", "2"],
            ["construct", "--algorithm", "hammersley", "--base", "2", "--m", "2", "--s", "3"],
            ["construct", "--algorithm", "hammersley", "--base", "2", "--m", "2", "--placement", "random:1"],
            ["construct", "--algorithm", "recursive", "--base", "2", "--m", "2", "--perms", "/nonexistent"],
            [],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_overflow(self, capsys):
        assert run(capsys, "construct", "--algorithm", "hammersley", "--base", "2", "--m", "70")[0] == 4


class TestVerify:
    def test_pass(self, capsys, hammersley_file):
        code, out, _ = run(capsys, "verify", "--in", hammersley_file, "--t", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] and doc["violations"] == [] and doc["strength"] == 0

    def test_fail(self, capsys, dup_file):
        code, out, _ = run(capsys, "verify", "--in", dup_file, "--t", "0")
        assert code == 1
        doc = json.loads(out)
        assert not doc["passed"] and doc["violations"]
        assert doc["first_violation"] == doc["violations"][0]
        assert {"shape": [2, 0], "cells": [0, 0], "count": 2} in doc["violations"]
        assert doc["strength"] == 1

    def test_t_equals_m(self, capsys, dup_file):
        assert run(capsys, "verify", "--in", dup_file, "--t", "2")[0] == 0

    def test_malformed(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"version":1}')
        assert run(capsys, "verify", "--in", str(bad), "--t", "0")[0] == 2
        bad.write_text("not json")
        assert run(capsys, "verify", "--in", str(bad), "--t", "0")[0] == 2
        assert run(capsys, "verify", "--in", str(tmp_path / "missing.json"), "--t", "0")[0] == 2

    def test_t_out_of_range(self, capsys, hammersley_file):
        assert run(capsys, "verify", "--in", hammersley_file, "--t", "4")[0] == 2


class TestAnalyze:
    def test_single_point(self, capsys, tmp_path):
        path = tmp_path / "one.json"
        path.write_text(netfile.emit(netfile.NetFile(NetPoints(2, 2, 0, ((0, 0),)), 0)))
        code, out, _ = run(capsys, "analyze", "--in", str(path), "--extreme")
        doc = json.loads(out)
        assert code == 0
        assert doc["star"]["num"] == 1 and doc["star"]["den"] == 1
        assert doc["extreme"]["num"] == 1
        # bound at m=0 is 9 + 4/b, so min(1, bound) = 1
        assert doc["within_bound"] is True

    def test_hammersley(self, capsys, tmp_path):
        path = tmp_path / "h1.json"
        path.write_text(netfile.emit(netfile.NetFile(hammersley(2, 1), 1)))
        code, out, _ = run(capsys, "analyze", "--in", str(path))
        doc = json.loads(out)
        assert (doc["star"]["num"], doc["star"]["den"]) == (3, 4)
        assert "extreme" not in doc

    def test_extreme_budget(self, capsys, tmp_path):
        path = tmp_path / "h7.json"
        path.write_text(netfile.emit(netfile.NetFile(hammersley(2, 7), 7)))
        assert run(capsys, "analyze", "--in", str(path), "--extreme")[0] == 4

    def test_figure(self, capsys, hammersley_file, tmp_path):
        fig = tmp_path / "fig.png"
        code, out, _ = run(capsys, "analyze", "--in", hammersley_file, "--figure", str(fig))
        assert code == 0
        assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        assert json.loads(out)["within_bound"] is True


class TestPlot:
    def test_eight_squares(self, capsys, hammersley_file):
        code, out, _ = run(capsys, "plot", "--in", hammersley_file)
        assert code == 0
        body = out.split('<g fill="black" stroke="none">')[1].split("</g>")[0]
        rects = [line for line in body.splitlines() if line.startswith("<rect")]
        assert len(rects) == 8
        xs = {r.split('x="')[1].split('"')[0] for r in rects}
        ys = {r.split('y="')[1].split('"')[0] for r in rects}
        assert len(xs) == len(ys) == 8

    def test_unit_square_at_m0(self, capsys, tmp_path):
        path = tmp_path / "one.json"
        path.write_text(netfile.emit(netfile.NetFile(NetPoints(3, 2, 0, ((0, 0),)), 0)))
        _, out, _ = run(capsys, "plot", "--in", str(path))
        assert '<rect x="0" y="0" width="512" height="512"/>' in out

    def test_deterministic(self, capsys, hammersley_file):
        outs = {run(capsys, "plot", "--in", hammersley_file, "--grid", "--boxes")[1] for _ in range(2)}
        assert len(outs) == 1
        assert next(iter(outs)).startswith('<?xml version="1.0"')

    def test_malformed(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("[]")
        assert run(capsys, "plot", "--in", str(bad))[0] == 2


class TestSearch:
    def test_none(self, capsys):
        code, out, _ = run(capsys, "search", "--base", "2", "--m", "2", "--s", "4")
        assert code == 1 and json.loads(out)["result"] == "none"

    def test_witness(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        code, _, _ = run(capsys, "search", "--base", "2", "--m", "2", "--s", "3", "--out", str(path))
        assert code == 0
        assert run(capsys, "verify", "--in", str(path), "--t", "0")[0] == 0

    def test_stall(self, capsys):
        code, out, _ = run(capsys, "search", "--stall", "--base", "2", "--m", "2", "--s", "3")
        assert code == 0 and json.loads(out)["length"] == 2

    def test_stall_none(self, capsys):
        assert run(capsys, "search", "--stall", "--base", "2", "--m", "1", "--s", "3")[0] == 1

    def test_budget(self, capsys):
        assert run(capsys, "search", "--base", "2", "--m", "2", "--s", "4", "--budget", "100")[0] == 4

    def test_env_budget(self, capsys, monkeypatch):
        monkeypatch.setenv("NETFORGE_BUDGET", "100")
        assert run(capsys, "search", "--base", "2", "--m", "2", "--s", "4")[0] == 4

    def test_invalid_flags(self, capsys):
        assert run(capsys, "search", "--base", "2", "--m", "2")[0] == 2


class TestNetFile:
    @settings(max_examples=50, deadline=None)
    @given(b=st.sampled_from([2, 3, 5]), m=st.integers(0, 3), seed=st.integers(0, 10**6))
    def test_round_trip(self, b, m, seed):
        fam = PermutationFamily.random(b, m, seed)
        from netforge.recursive import recursive_run

        nf = netfile.NetFile(recursive_run(b, m, fam), m, {"algorithm": "recursive", "seed": seed})
        text = netfile.emit(nf)
        again = netfile.parse(text)
        assert again.points == nf.points and again.m == m
        assert netfile.emit(again) == text

    def test_canonical(self):
        text = netfile.emit(netfile.NetFile(hammersley(2, 1), 1, {"algorithm": "hammersley"}))
        assert text == '{"b":2,"g":1,"m":1,"points":[[0,0],[1,1]],"provenance":{"algorithm":"hammersley"},"s":2,"version":1}\n'

    @pytest.mark.parametrize(
        "doc",
        [
            {"version": 2, "b": 2, "m": 0, "s": 2, "g": 0, "points": [[0, 0]]},
            {"version": 1, "b": 2, "m": 1, "s": 2, "g": 1, "points": [[0, 0]]},
            {"version": 1, "b": 2, "m": 1, "s": 2, "g": 0, "points": [[0, 0], [0, 0]]},
            {"version": 1, "b": 2, "m": 0, "s": 2, "g": 0, "points": [[0, 1]]},
            {"version": 1, "b": 2, "m": 0, "s": 2, "g": 0, "points": [[0, 0.0]]},
            {"version": 1, "b": 2, "m": 0, "s": 2, "g": 0, "points": [[0, 0]], "provenance": {"algorithm": "x"}},
            {"version": 1, "b": 2, "m": 0, "s": 2, "g": 0, "points": [[0, 0]], "extra": 1},
        ],
    )
    def test_rejects(self, doc):
        with pytest.raises(MalformedInput):
            netfile.parse(json.dumps(doc))


def test_console_entry_point(tmp_path):
    out = tmp_path / "h.json"
    proc = subprocess.run(
        [sys.executable, "-m", "netforge", "construct", "--algorithm", "hammersley", "--base", "3", "--m", "2", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "netforge", "verify", "--in", str(out), "--t", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]


def test_construct_verify_pipeline(capsys, tmp_path):
    path = str(tmp_path / "net.json")
    jobs = []
    for seed in range(100):
        jobs.append(["--algorithm", "greedy", "--base", "2", "--m", str(seed % 7), "--policy", "random", "--seed", str(seed)])
    for seed in range(100):
        b = 2 + seed % 2
        jobs.append(["--algorithm", "recursive", "--base", str(b), "--m", str(seed % 6), "--perms", "random", "--seed", str(seed)])
    for job in jobs:
        assert run(capsys, "construct", *job, "--out", path)[0] == 0
        assert run(capsys, "verify", "--in", path, "--t", "0")[0] == 0
