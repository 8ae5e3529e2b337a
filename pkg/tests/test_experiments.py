"""Experiment harness: config parsing, sweep plumbing, SVG output, CLI."""

import os

import numpy as np
import pytest

from meandim.cli import build_parser, main
from meandim.experiments import (
    EXPERIMENT_KINDS,
    ExperimentConfig,
    PeakReport,
    SweepResult,
    parse_experiment_config,
    load_experiment_config,
    run_experiment,
    summarize_peaks,
    write_sweep_csv,
)
from meandim.experiments import _run_cells
from meandim.heatmap_svg import CELL_PX, emit_heatmap_svg, render_heatmap_svg
from meandim.replica import CURVE_HEADER
from meandim.rfm import Activation, random_rfm, save_rfm

# ---------------------------------------------------------------------------
# config parsing


RFM_CONFIG = """
# comment-only lines and blanks are skipped
kind = double-descent-rfm
seed = 7
reps = 2
dim = 8            # trailing comments too
n_train = 24
widths = 4, 8, 16
"""


def test_parse_basic_config():
    cfg = parse_experiment_config(RFM_CONFIG)
    assert cfg.kind == "double-descent-rfm"
    assert cfg.seed == 7 and cfg.reps == 2 and cfg.jobs == 1
    assert cfg.out_dir == "out"
    assert cfg.params["dim"] == 8
    assert cfg.params["widths"] == (4, 8, 16)
    # defaults fill the remaining schema slots
    assert cfg.params["lam"] == 1e-4
    assert cfg.params["input_kind"] == "binary"


def test_parse_rejects_missing_kind():
    with pytest.raises(ValueError, match="'kind' is required"):
        parse_experiment_config("dim = 4")


def test_parse_rejects_unknown_kind():
    with pytest.raises(ValueError, match="unknown experiment kind"):
        parse_experiment_config("kind = frobnicate")


def test_parse_rejects_unknown_field():
    bad = RFM_CONFIG + "\nnope = 3"
    with pytest.raises(ValueError, match="unknown config field 'nope'"):
        parse_experiment_config(bad)


def test_parse_rejects_missing_required_field():
    with pytest.raises(ValueError, match="'widths' is required"):
        parse_experiment_config("kind = double-descent-rfm\ndim = 8\nn_train = 24")


def test_parse_rejects_duplicate_key():
    with pytest.raises(ValueError, match="given twice"):
        parse_experiment_config("kind = theory-curve\nseed = 1\nseed = 2")


def test_parse_rejects_bare_line():
    with pytest.raises(ValueError, match="config line 2"):
        parse_experiment_config("kind = theory-curve\njust words")


def test_parse_error_names_bad_field():
    bad = "kind = double-descent-rfm\ndim = 8\nn_train = 24\nwidths = a,b"
    with pytest.raises(ValueError, match="config field 'widths'"):
        parse_experiment_config(bad)


def test_parse_bool_and_ranges():
    cfg = parse_experiment_config(
        "kind = regularization-sweep\nlams = 1e-4 1e-2\nempirical = yes\n"
        "widths = 4 8")
    assert cfg.params["empirical"] is True
    with pytest.raises(ValueError, match="boolean"):
        parse_experiment_config(
            "kind = regularization-sweep\nlams = 1\nempirical = maybe")
    cfg = parse_experiment_config(
        "kind = normalization-comparison\ndim = 4\nn_train = 8\n"
        "widths = 4\nranges = -1:1 -2:2")
    assert cfg.params["ranges"] == ((-1.0, 1.0), (-2.0, 2.0))
    with pytest.raises(ValueError, match="lo < hi"):
        parse_experiment_config(
            "kind = normalization-comparison\ndim = 4\nn_train = 8\n"
            "widths = 4\nranges = 1:-1")
    with pytest.raises(ValueError, match="not lo:hi"):
        parse_experiment_config(
            "kind = normalization-comparison\ndim = 4\nn_train = 8\n"
            "widths = 4\nranges = 11")


def test_parse_validates_grid_fields():
    with pytest.raises(ValueError, match="grid_points"):
        parse_experiment_config("kind = theory-curve\ngrid_points = 1")
    with pytest.raises(ValueError, match="grid_min"):
        parse_experiment_config(
            "kind = theory-curve\ngrid_min = 5.0\ngrid_max = 2.0")


def test_parse_empirical_needs_widths():
    with pytest.raises(ValueError, match="'widths' is required when"):
        parse_experiment_config(
            "kind = regularization-sweep\nlams = 1e-4\nempirical = true")


def test_config_validates_reps_and_jobs():
    with pytest.raises(ValueError, match="reps"):
        parse_experiment_config("kind = theory-curve\nreps = 0")
    with pytest.raises(ValueError, match="jobs"):
        parse_experiment_config("kind = theory-curve\njobs = 0")
    with pytest.raises(ValueError, match="unknown experiment kind"):
        ExperimentConfig(kind="nope", seed=0, reps=1, out_dir="out",
                         jobs=1, params={})


def test_load_experiment_config_roundtrip(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(RFM_CONFIG, encoding="ascii")
    cfg = load_experiment_config(path)
    assert cfg == parse_experiment_config(RFM_CONFIG)


def test_kinds_and_schemas_agree():
    for kind in EXPERIMENT_KINDS:
        minimal = {"double-descent-rfm": "dim = 4\nn_train = 8\nwidths = 4",
                   "double-descent-mlp": "dim = 4\nn_train = 8\nwidths = 4",
                   "theory-curve": "",
                   "regularization-sweep": "lams = 1e-4",
                   "trainset-size-sweep": "dim = 4\nwidth = 4\nn_trains = 8",
                   "adversarial-init": "dim = 4\nn_train = 8\nwidth = 4",
                   "robustness-sweep": "dim = 4\nn_train = 8\nwidths = 4",
                   "heatmap": "grid_height = 2\ngrid_width = 2\n"
                              "n_feat = 4\nn_train = 8",
                   "distribution-comparison": "dim = 4\nn_train = 8\nwidths = 4",
                   "normalization-comparison": "dim = 4\nn_train = 8\nwidths = 4"}
        cfg = parse_experiment_config(f"kind = {kind}\n" + minimal[kind])
        assert cfg.kind == kind


# ---------------------------------------------------------------------------
# sweep results and peak summaries


def make_sweep(values, coords=None, reps=None):
    first = next(iter(values.values()))
    arr = {k: np.asarray(v, dtype=float) for k, v in values.items()}
    n, r = np.asarray(first).shape
    return SweepResult(coordinate="width",
                       coords=tuple(coords or range(n)),
                       values=arr, reps=reps or r)


def test_sweep_result_validates_shape():
    with pytest.raises(ValueError, match="shape"):
        SweepResult(coordinate="width", coords=(1, 2), reps=2,
                    values={"bmd": np.zeros((2, 3))})


def test_sweep_result_mean_and_std():
    res = make_sweep({"bmd": [[1.0, 3.0], [2.0, np.nan]]})
    assert res.mean("bmd") == pytest.approx([2.0, 2.0])
    np.testing.assert_allclose(res.std("bmd")[0], np.std([1.0, 3.0], ddof=1))
    single = make_sweep({"bmd": [[1.0], [2.0]]})
    assert single.std("bmd") is None


def test_write_sweep_csv_columns(tmp_path):
    res = make_sweep({"test_err": [[0.5, 0.3], [0.2, 0.4]],
                      "bmd": [[1.0, 1.2], [1.1, 1.3]]}, coords=(8, 16))
    path = tmp_path / "sweep.csv"
    write_sweep_csv(path, res)
    lines = path.read_text(encoding="ascii").splitlines()
    assert lines[0] == "width,test_err_mean,test_err_std,bmd_mean,bmd_std"
    cells = lines[1].split(",")
    assert int(cells[0]) == 8
    assert float(cells[1]) == pytest.approx(0.4)
    # reps == 1 drops the std columns
    single = make_sweep({"bmd": [[1.0], [2.0]]}, coords=(8, 16))
    write_sweep_csv(path, single)
    assert path.read_text(encoding="ascii").splitlines()[0] == "width,bmd_mean"


def test_summarize_peaks_needs_enough_points():
    res = make_sweep({"bmd": [[1.0], [2.0]]})
    with pytest.raises(ValueError, match="at least 5"):
        summarize_peaks(res)


def test_summarize_peaks_rejects_all_nan():
    res = make_sweep({"bmd": [[np.nan]] * 5})
    with pytest.raises(ValueError, match="all-NaN"):
        summarize_peaks(res)


def test_summarize_peaks_locations_and_distance():
    res = make_sweep({
        "test_err": [[0.1], [0.2], [0.9], [0.2], [0.1]],
        "bmd": [[1.0], [1.1], [1.9], [1.2], [1.0]],
    }, coords=(4, 8, 16, 32, 64))
    report = summarize_peaks(res)
    assert report.argmax["test_err"] == 16 and report.argmax["bmd"] == 16
    assert report.interior["bmd"] is True
    assert report.distance_steps == 0
    assert report.correlations[("test_err", "bmd")] == pytest.approx(1.0, abs=1e-2)
    text = "\n".join(report.lines())
    assert "interior peak" in text and "0 grid steps" in text


def test_summarize_peaks_flags_boundary():
    res = make_sweep({"bmd": [[5.0], [4.0], [3.0], [2.0], [1.0]]})
    report = summarize_peaks(res)
    assert report.interior["bmd"] is False
    assert report.distance_steps is None  # no test_err metric
    assert "boundary, no interior peak" in report.lines()[0]


def test_summarize_peaks_correlation_pairs():
    res = make_sweep({
        "bmd": [[1.0], [2.0], [3.0], [2.5], [2.0]],
        "flip_count": [[9.0], [8.0], [7.0], [7.5], [8.0]],
    })
    report = summarize_peaks(res, pairs=(("bmd", "flip_count"),))
    assert report.correlations[("bmd", "flip_count")] < -0.9
    with pytest.raises(ValueError, match="not in sweep metrics"):
        summarize_peaks(res, pairs=(("bmd", "nope"),))
    sparse = make_sweep({"a": [[np.nan]] * 4 + [[1.0]],
                         "b": [[1.0]] * 5})
    with pytest.raises(ValueError, match="fewer than 3 finite"):
        summarize_peaks(sparse, pairs=(("a", "b"),))


def test_run_cells_wraps_failures():
    def cell(i, rep):
        if (i, rep) == (1, 0):
            raise ValueError("boom")
        return {"m": 0.0}

    with pytest.raises(RuntimeError, match=r"width=16, rep=0 failed: boom"):
        _run_cells(cell, (8, 16), ("m",), reps=1, jobs=1, coordinate="width")
    with pytest.raises(RuntimeError, match=r"width=16, rep=0 failed: boom"):
        _run_cells(cell, (8, 16), ("m",), reps=1, jobs=3, coordinate="width")


def test_run_cells_jobs_do_not_change_values():
    def cell(i, rep):
        return {"m": 100.0 * i + rep}

    a = _run_cells(cell, (1, 2, 3), ("m",), reps=2, jobs=1, coordinate="w")
    b = _run_cells(cell, (1, 2, 3), ("m",), reps=2, jobs=4, coordinate="w")
    np.testing.assert_array_equal(a.values["m"], b.values["m"])


# ---------------------------------------------------------------------------
# SVG rendering


def test_svg_single_white_cell():
    doc = render_heatmap_svg([[1.0]])
    assert doc == (
        '<svg xmlns="http://www.w3.org/2000/svg" width="16" height="16" '
        'viewBox="0 0 16 16" shape-rendering="crispEdges">\n'
        '<rect x="0" y="0" width="16" height="16" fill="#ffffff"/>\n'
        "</svg>\n")


def test_svg_grid_layout_and_levels():
    doc = render_heatmap_svg([[0.0, 0.5], [1.0, 0.25]])
    lines = doc.splitlines()
    assert 'width="32"' in lines[0] and 'height="32"' in lines[0]
    assert lines[1] == '<rect x="0" y="0" width="16" height="16" fill="#000000"/>'
    assert 'x="16" y="0"' in lines[2] and "#808080" in lines[2]  # rint(127.5)=128
    assert 'x="0" y="16"' in lines[3] and "#ffffff" in lines[3]
    assert "#404040" in lines[4]  # round(63.75) = 64
    assert lines[5] == "</svg>"


def test_svg_uniform_grid_single_color():
    doc = render_heatmap_svg(np.full((3, 4), 0.2))
    rects = [l for l in doc.splitlines() if l.startswith("<rect")]
    assert len(rects) == 12
    fills = {r.split('fill="')[1][:7] for r in rects}
    assert len(fills) == 1


def test_svg_input_validation():
    with pytest.raises(ValueError, match="rectangular"):
        render_heatmap_svg([[0.1, 0.2], [0.3]])
    with pytest.raises(ValueError, match="2-D"):
        render_heatmap_svg([0.1, 0.2])
    with pytest.raises(ValueError, match="2-D"):
        render_heatmap_svg(np.zeros((0, 3)))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        render_heatmap_svg([[1.5]])
    with pytest.raises(ValueError, match="non-finite"):
        render_heatmap_svg([[np.nan]])


def test_emit_heatmap_svg_writes_bytes(tmp_path):
    grid = np.linspace(0.0, 1.0, 6).reshape(2, 3)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_heatmap_svg(grid, p1)
    emit_heatmap_svg(grid, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text(encoding="ascii") == render_heatmap_svg(grid)
    assert CELL_PX == 16


# ---------------------------------------------------------------------------
# end-to-end experiment runs (tiny scale; correctness of shapes and files,
# not of the science, which the acceptance suite covers at real scale)


def read_lines(path):
    with open(path, "r", encoding="ascii") as fh:
        return fh.read().splitlines()


def read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_run_double_descent_rfm(tmp_path):
    cfg = parse_experiment_config(
        "kind = double-descent-rfm\nseed = 3\nreps = 2\ndim = 8\n"
        "n_train = 24\nn_test = 60\nwidths = 4 8 16 24 32")
    paths = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    csv, summary = paths
    lines = read_lines(csv)
    assert lines[0].startswith("width,train_err_mean")
    assert len(lines) == 6
    text = "\n".join(read_lines(summary))
    assert "experiment: double-descent-rfm" in text
    assert "argmax bmd" in text and "corr(test_err, bmd)" in text


def test_rerun_is_byte_identical_and_jobs_free(tmp_path):
    text = ("kind = double-descent-rfm\nseed = 1\nreps = 2\ndim = 6\n"
            "n_train = 20\nn_test = 40\nwidths = 4 8")
    outs = []
    for name, jobs in (("a", 1), ("b", 4), ("c", 1)):
        cfg = parse_experiment_config(text)
        paths = run_experiment(cfg, out_dir=str(tmp_path / name), jobs=jobs)
        outs.append([read_bytes(p) for p in paths])
    assert outs[0] == outs[1] == outs[2]


def test_run_experiment_accepts_config_path(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        "kind = theory-curve\ngrid_min = 0.5\ngrid_max = 2.0\n"
        f"grid_points = 5\nout = {tmp_path / 'th'}\n", encoding="ascii")
    paths = run_experiment(str(cfg_file))
    lines = read_lines(paths[0])
    assert lines[0] == CURVE_HEADER
    assert len(lines) == 6
    text = "\n".join(read_lines(paths[1]))
    assert "replica eps_g" in text


def test_run_regularization_sweep_theory_and_empirical(tmp_path):
    cfg = parse_experiment_config(
        "kind = regularization-sweep\nlams = 1e-4 1\ngrid_min = 0.5\n"
        "grid_max = 2.0\ngrid_points = 4\nempirical = true\nreps = 2\n"
        "dim = 6\nn_train = 20\nn_test = 40\nwidths = 4 8")
    paths = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    names = sorted(os.path.basename(p) for p in paths)
    assert names == ["empirical_lam_0.0001.csv", "empirical_lam_1.csv",
                     "summary.txt", "theory_lam_0.0001.csv", "theory_lam_1.csv"]
    text = "\n".join(read_lines(paths[-1]))
    assert "theory lam=0.0001: peak bmd" in text
    assert "empirical lam=1: peak bmd" in text


def test_run_trainset_size_sweep(tmp_path):
    cfg = parse_experiment_config(
        "kind = trainset-size-sweep\ndim = 6\nwidth = 8\n"
        "n_trains = 10 20 40\nn_test = 40")
    csv, summary = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    lines = read_lines(csv)
    assert lines[0].startswith("n_train,")
    assert len(lines) == 4


def test_run_double_descent_mlp_binary(tmp_path):
    cfg = parse_experiment_config(
        "kind = double-descent-mlp\ndim = 6\nn_train = 24\nn_test = 30\n"
        "widths = 4 8\nepochs = 3\nmd_samples = 200\nloss = mse\nn_classes = 2")
    csv, summary = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    lines = read_lines(csv)
    assert len(lines) == 3
    vals = [float(v) for v in lines[1].split(",")[1:]]
    assert all(np.isfinite(vals))


def test_run_adversarial_init_tiny(tmp_path):
    cfg = parse_experiment_config(
        "kind = adversarial-init\ndim = 6\nn_train = 40\nn_test = 40\n"
        "width = 8\nn_classes = 3\npretrain_grid = 0 2\nepochs = 2\n"
        "md_samples = 150")
    csv, summary = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    lines = read_lines(csv)
    assert lines[0].startswith("pretrain_epochs,")
    assert len(lines) == 3
    text = "\n".join(read_lines(summary))
    assert "spearman(pretrain_epochs, bmd)" in text
    assert "spearman(pretrain_epochs, test_err)" in text


def test_run_robustness_sweep_tiny(tmp_path):
    cfg = parse_experiment_config(
        "kind = robustness-sweep\ndim = 6\nn_train = 40\nn_test = 40\n"
        "widths = 4 8\nn_classes = 3\nepochs = 2\nmd_samples = 150\n"
        "flip_points = 20")
    csv, summary = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    header = read_lines(csv)[0]
    assert "flip_count_mean" in header and "bmd_mean" in header


def test_run_heatmap(tmp_path):
    cfg = parse_experiment_config(
        "kind = heatmap\ngrid_height = 4\ngrid_width = 4\nn_feat = 16\n"
        "n_train = 80\nsamples = 500")
    svg, csv, summary = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    doc = read_bytes(svg).decode("ascii")
    assert doc.startswith("<svg ") and doc.count("<rect") == 16
    assert read_lines(csv)[0] == "i,tau_sq"
    text = "\n".join(read_lines(summary))
    assert "influence mass on the support" in text
    # teacher lives on a centered block; the trained student should put
    # most of its influence there even at this tiny scale
    mass = float(text.split("influence mass on the support: ")[1].split()[0])
    assert mass > 0.3


def test_run_distribution_comparison(tmp_path):
    cfg = parse_experiment_config(
        "kind = distribution-comparison\ndim = 6\nn_train = 20\n"
        "n_test = 40\nwidths = 4 8\nsamples = 300")
    csv, summary = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    header = read_lines(csv)[0]
    for col in ("md_binary_mean", "md_gaussian_mean", "md_uniform_mean"):
        assert col in header
    text = "\n".join(read_lines(summary))
    assert "argmax md_binary" in text


def test_run_normalization_comparison(tmp_path):
    cfg = parse_experiment_config(
        "kind = normalization-comparison\ndim = 6\nn_train = 20\n"
        "n_test = 40\nwidths = 4 8\nsamples = 300\nranges = -1:1 -3:3")
    paths = run_experiment(cfg, out_dir=str(tmp_path / "o"))
    names = sorted(os.path.basename(p) for p in paths)
    assert names == ["range_-1_1.csv", "range_-3_3.csv", "summary.txt"]
    text = "\n".join(read_lines(paths[-1]))
    assert "range [-1, 1]: argmax bmd" in text


# ---------------------------------------------------------------------------
# command line


def test_parser_prog_and_subcommands():
    parser = build_parser()
    assert parser.prog == "meandim"
    args = parser.parse_args(["theory", "--loss", "mse", "--alpha-t", "3",
                              "--lambda", "0.1", "--grid", "0.5", "2", "5"])
    assert args.lam == 0.1 and args.alpha_t == 3.0


def test_cli_run_executes_config(tmp_path, capsys):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text(
        "kind = theory-curve\ngrid_min = 0.5\ngrid_max = 2.0\ngrid_points = 4\n",
        encoding="ascii")
    code = main(["run", str(cfg_file), "--out", str(tmp_path / "o"), "--jobs", "2"])
    assert code == 0
    printed = capsys.readouterr().out.splitlines()
    assert len(printed) == 2
    assert all(os.path.exists(p) for p in printed)


def test_cli_run_missing_config_exits_2(tmp_path, capsys):
    code = main(["run", str(tmp_path / "nope.cfg")])
    assert code == 2
    assert "meandim run:" in capsys.readouterr().err


def test_cli_run_bad_config_exits_2(tmp_path, capsys):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("kind = frobnicate\n", encoding="ascii")
    assert main(["run", str(cfg_file)]) == 2
    assert "unknown experiment kind" in capsys.readouterr().err


def checkpoint(tmp_path, D=6, N=10):
    model = random_rfm(D, N, Activation.tanh(), seed=5)
    path = tmp_path / "model.rfm"
    save_rfm(path, model)
    return str(path)


def test_cli_md_binary(tmp_path, capsys):
    path = checkpoint(tmp_path)
    profile_out = tmp_path / "prof.csv"
    code = main(["md", path, "--sampler", "binary", "--samples", "400",
                 "--seed", "2", "--profile-out", str(profile_out)])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("md = ")
    assert "std_err_md = " in out and "n_samples = 400" in out
    assert read_lines(profile_out)[0] == "i,tau_sq"


def test_cli_md_gaussian_sampler(tmp_path, capsys):
    code = main(["md", checkpoint(tmp_path), "--sampler", "gaussian",
                 "--samples", "300", "--seed", "4"])
    assert code == 0
    assert capsys.readouterr().out.startswith("md = ")


def test_cli_md_empirical_requires_data(tmp_path, capsys):
    code = main(["md", checkpoint(tmp_path), "--sampler", "empirical",
                 "--samples", "100", "--seed", "1"])
    assert code == 2
    assert "requires --data" in capsys.readouterr().err


def test_cli_md_empirical_checks_columns(tmp_path, capsys):
    data = tmp_path / "rows.csv"
    np.savetxt(data, np.random.default_rng(0).uniform(-1, 1, (30, 4)),
               delimiter=",")
    code = main(["md", checkpoint(tmp_path, D=6), "--sampler", "empirical",
                 "--samples", "100", "--seed", "1", "--data", str(data)])
    assert code == 2
    assert "columns" in capsys.readouterr().err


def test_cli_md_empirical_runs(tmp_path, capsys):
    data = tmp_path / "rows.csv"
    np.savetxt(data, np.random.default_rng(0).uniform(-1, 1, (30, 6)),
               delimiter=",")
    code = main(["md", checkpoint(tmp_path, D=6), "--sampler", "empirical",
                 "--samples", "200", "--seed", "1", "--data", str(data)])
    assert code == 0


def test_cli_md_bad_checkpoint_exits_2(tmp_path, capsys):
    bad = tmp_path / "junk.rfm"
    bad.write_text("not a checkpoint\n", encoding="ascii")
    assert main(["md", str(bad), "--sampler", "binary", "--samples", "10",
                 "--seed", "0"]) == 2


def test_cli_theory_prints_curve(tmp_path, capsys):
    out_csv = tmp_path / "curve.csv"
    code = main(["theory", "--loss", "mse", "--alpha-t", "3",
                 "--lambda", "1e-4", "--grid", "0.5", "2.0", "4",
                 "--out", str(out_csv)])
    assert code == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed[0] == CURVE_HEADER
    assert len(printed) == 5
    # the file holds exactly what was printed
    assert read_lines(out_csv) == printed
    row = printed[1].split(",")
    assert row[3] == "mse" and row[-1] == "1"
    assert float(row[0]) == pytest.approx(0.5)


def test_cli_theory_rejects_bad_grid(capsys):
    code = main(["theory", "--loss", "mse", "--alpha-t", "3",
                 "--lambda", "1e-4", "--grid", "2.0", "0.5", "4"])
    assert code == 2
    assert "meandim theory:" in capsys.readouterr().err
