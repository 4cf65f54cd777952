import shutil
import subprocess

import pytest

from jsdm_figures import FigureSpec, SchemaError, collect_series, read_rows, render

HEADER = ("experiment,seed,snr_db,alpha,dol_th,approach,sum_rate,jain_index,"
          "num_schedules,num_clusters,elapsed_ms")


def rate_csv_lines():
    rows = []
    for seed in (1, 2):
        for snr, best, base in ((0.0, 10.0, 8.0), (10.0, 30.0, 20.0)):
            rows.append(f"rate,{seed},{snr},2.0,0.9,approx_bd,{best - 1.0},0.7,3,9,0")
            rows.append(f"rate:best,{seed},{snr},2.0,0.9,approx_bd,{best + seed},0.8,3,9,0")
            rows.append(f"rate:noscheduling,{seed},{snr},0.0,0.9,approx_bd,{base + seed},0.75,1,9,0")
    return [HEADER] + rows


def write_csv(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def test_read_rows_validates_schema(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("experiment,seed,sum_rate\nrate,1,2.0\n", encoding="utf-8")
    with pytest.raises(SchemaError) as err:
        read_rows(str(bad))
    assert "snr_db" in str(err.value)           # names the missing columns
    assert "jain_index" in str(err.value)


def test_collect_series_groups_and_averages(tmp_path):
    path = write_csv(tmp_path / "rate.csv", rate_csv_lines())
    series = collect_series(read_rows(path), "rate")
    assert sorted(series) == ["rate:best", "rate:noscheduling"]
    # seed mean at snr 0: best rows 11 and 12 -> 11.5
    assert series["rate:best"][0] == (0.0, 11.5)


def test_render_all_kinds_from_fixture(tmp_path):
    path = write_csv(tmp_path / "rows.csv", rate_csv_lines())
    for kind in ("rate", "fairness"):
        out = render(FigureSpec(path, kind, str(tmp_path / f"{kind}.png")))
        data = (tmp_path / f"{kind}.png").read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"
        assert len(data) > 1000
    # precoders and threshold kinds want their own shapes
    precoders = [HEADER,
                 "precoders:matched:best,1,0.0,2.0,0.9,matched,12.0,0.8,3,9,0",
                 "precoders:matched:best,1,10.0,2.0,0.9,matched,26.0,0.8,3,9,0",
                 "precoders:approx_bd:best,1,0.0,2.0,0.9,approx_bd,9.0,0.8,3,9,0",
                 "precoders:approx_bd:best,1,10.0,2.0,0.9,approx_bd,25.0,0.8,3,9,0"]
    p = write_csv(tmp_path / "precoders.csv", precoders)
    render(FigureSpec(p, "precoders", str(tmp_path / "p.png")))
    threshold = [HEADER,
                 "threshold:best,1,0.0,2.0,0.5,matched,14.0,0.8,3,9,0",
                 "threshold:best,1,0.0,2.0,0.9,matched,15.0,0.8,3,9,0",
                 "threshold:best,1,25.0,2.0,0.5,matched,44.0,0.8,3,9,0",
                 "threshold:best,1,25.0,2.0,0.9,matched,41.0,0.8,3,9,0"]
    t = write_csv(tmp_path / "threshold.csv", threshold)
    render(FigureSpec(t, "threshold", str(tmp_path / "t.png")))
    series = collect_series(read_rows(t), "threshold")
    assert sorted(series) == ["0.0", "25.0"]    # one series per SNR


def test_render_single_row_csv(tmp_path):
    lines = [HEADER, "rate:best,1,10.0,2.0,0.9,approx_bd,30.0,0.8,3,9,0"]
    path = write_csv(tmp_path / "one.csv", lines)
    out = tmp_path / "one.png"
    render(FigureSpec(path, "rate", str(out)))
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_render_is_byte_stable_and_does_not_touch_input(tmp_path):
    path = write_csv(tmp_path / "rows.csv", rate_csv_lines())
    before = (tmp_path / "rows.csv").read_bytes()
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(FigureSpec(path, "rate", str(a)))
    render(FigureSpec(path, "rate", str(b)))
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "rows.csv").read_bytes() == before


def test_cli_round_trip(tmp_path, capsys):
    from jsdm_figures.cli import main
    path = write_csv(tmp_path / "rows.csv", rate_csv_lines())
    out = tmp_path / "cli.png"
    assert main([path, "--kind", "rate", "--out", str(out)]) == 0
    assert out.exists()
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n", encoding="utf-8")
    assert main([str(bad), "--kind", "rate", "--out", str(out)]) == 1


@pytest.mark.skipif(shutil.which("jsdm") is None,
                    reason="simulator CLI not on PATH")
def test_acceptance_render_from_harness_csvs(tmp_path):
    """[SECONDARY] acceptance: all four kinds render from real harness
    CSVs; re-render on identical input is byte-stable."""
    common = ["--seeds", "1", "--num_users", "6", "--num_slots", "4",
              "--alpha_sweep", "1,4", "--out", str(tmp_path)]
    specs = {
        "rate": ["figure", "rate", "--snr_db", "0,10"],
        "fairness": ["figure", "fairness", "--snr_db", "0,10"],
        "precoders": ["figure", "precoders", "--snr_db", "0,10"],
        "threshold": ["figure", "threshold", "--snr_db", "10",
                      "--threshold_sweep", "0.6,0.9"],
    }
    for kind, args in specs.items():
        subprocess.run(["jsdm"] + args + common, check=True,
                       capture_output=True)
        csv_path = tmp_path / f"figure_{kind}.csv"
        assert csv_path.exists()
        out_a = tmp_path / f"{kind}_a.png"
        out_b = tmp_path / f"{kind}_b.png"
        render(FigureSpec(str(csv_path), kind, str(out_a)))
        render(FigureSpec(str(csv_path), kind, str(out_b)))
        assert out_a.read_bytes() == out_b.read_bytes()
        rows = read_rows(str(csv_path))
        series = collect_series(rows, kind)
        group_col = "snr_db" if kind == "threshold" else "experiment"
        expected = {str(r[group_col]) for r in rows
                    if r["experiment"].endswith(":best")
                    or (kind in ("rate", "fairness")
                        and r["experiment"].endswith(":noscheduling"))}
        assert set(series) == expected          # one series per grouping value
        print(f"[PASS] secondary render {kind}: {sorted(series)}")
