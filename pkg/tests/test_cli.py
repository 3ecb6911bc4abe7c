import json

import pytest

from walkshuffle.cli import main


def run_cli(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    assert code == 0
    return out.read_text()


def parse_csv(text):
    import csv as _csv

    meta, data_lines = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
        else:
            data_lines.append(line)
    parsed = list(_csv.reader(data_lines))
    header, rows = parsed[0], [dict(zip(parsed[0], r)) for r in parsed[1:]]
    return meta, header, rows


def test_graph_stats_on_generated_graph(tmp_path):
    text = run_cli(
        ["graph-stats", "--dataset", "regular:200,8", "--seed", "1", "--spectral"],
        tmp_path,
    )
    meta, header, rows = parse_csv(text)
    assert meta["schema"] == "graph_stats.v1"
    assert rows[0]["n"] == "200"
    assert float(rows[0]["gamma"]) == 1.0
    assert rows[0]["is_connected"] == "true"
    assert float(rows[0]["gap"]) > 0
    assert int(rows[0]["mixing_time"]) >= 1


def test_amplify_zero_budget_row(tmp_path):
    text = run_cli(
        ["amplify", "--eps0", "0", "--n", "1000", "--sum-p2", "0.002"], tmp_path
    )
    meta, header, rows = parse_csv(text)
    assert meta["schema"] == "amplify.v1"
    assert float(rows[0]["epsilon"]) == 0.0
    # documented delta defaults 1/n^2, 1/n^3
    assert float(rows[0]["delta"]) == pytest.approx(1e-6)
    assert float(rows[0]["delta1"]) == pytest.approx(1e-9)


def test_amplify_from_generated_dataset(tmp_path):
    text = run_cli(
        [
            "amplify", "--eps0", "1.0", "--dataset", "regular:128,8",
            "--seed", "3", "--steps", "mixing", "--scenario", "symmetric",
        ],
        tmp_path,
    )
    _, _, rows = parse_csv(text)
    assert rows[0]["scenario"] == "symmetric"
    assert float(rows[0]["epsilon"]) > 0
    assert float(rows[0]["rho_star"]) >= 1.0


def test_simulate_zero_trials_header_only(tmp_path):
    text = run_cli(
        ["simulate", "--dataset", "regular:64,4", "--seed", "2", "--steps", "3",
         "--trials", "0"],
        tmp_path,
    )
    meta, header, rows = parse_csv(text)
    assert meta["schema"] == "simulate.v1"
    assert header[:3] == ["record", "key", "value"]
    assert rows == []


def test_simulate_histogram_conserves_reports(tmp_path):
    text = run_cli(
        ["simulate", "--dataset", "regular:64,4", "--seed", "2", "--steps", "3",
         "--trials", "50"],
        tmp_path,
    )
    _, _, rows = parse_csv(text)
    hist = {int(r["key"]): int(r["value"]) for r in rows if r["record"] == "histogram"}
    assert sum(hist.values()) == 64 * 50  # node-slots
    assert sum(k * v for k, v in hist.items()) == 64 * 50  # reports conserved
    quantiles = [r for r in rows if r["record"] == "l2_quantile"]
    assert len(quantiles) == 7


def test_csv_deterministic_given_seed(tmp_path):
    args = ["figure", "fig4", "--dataset", "regular:256,4", "--trials", "2",
            "--seed", "9", "--eps0", "1.0"]
    a = run_cli(args, tmp_path, "a.csv")
    b = run_cli(args, tmp_path, "b.csv")
    assert a == b


def test_fig7_needs_no_datasets(tmp_path):
    text = run_cli(["figure", "fig7"], tmp_path)
    meta, header, rows = parse_csv(text)
    assert meta["schema"] == "figure-fig7.v1"
    assert header == ["x", "y", "series"]
    series = {r["series"] for r in rows}
    assert "identity" in series
    assert "all,n=10000,gamma=1" in series
    assert len(series) == 9
    # identity line really is epsilon0
    ident = [r for r in rows if r["series"] == "identity"]
    assert all(float(r["x"]) == float(r["y"]) for r in ident)
    # amplification beats no-amplification for large n at small eps0
    google_scale = [r for r in rows if r["series"] == "all,n=1000000,gamma=1"]
    assert float(google_scale[0]["y"]) < float(google_scale[0]["x"])


def test_fig4_emits_series_per_degree(tmp_path):
    text = run_cli(
        ["figure", "fig4", "--dataset", "regular:256,4", "--dataset", "regular:256,8",
         "--trials", "2", "--seed", "4"],
        tmp_path,
    )
    meta, _, rows = parse_csv(text)
    assert {r["series"] for r in rows} == {"k=4", "k=8"}
    ts = sorted(int(r["x"]) for r in rows if r["series"] == "k=4")
    assert ts[0] == 1 and ts == list(range(1, ts[-1] + 1))


def test_missing_manifest_entry_errors(tmp_path, capsys):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"twitch": "missing.txt"}))
    code = main(["graph-stats", "--dataset", "twitch", "--manifest", str(manifest)])
    assert code == 2
    err = capsys.readouterr().err
    assert "twitch" in err
    code = main(["graph-stats", "--dataset", "facebook", "--manifest", str(manifest)])
    assert code == 2
    assert "facebook" in capsys.readouterr().err


def test_utility_rows_echo_inputs(tmp_path):
    text = run_cli(
        ["utility", "--dataset", "regular:64,4", "--seed", "1", "--trials", "2",
         "--eps0", "0.5,1.0", "--d", "8", "--steps", "4"],
        tmp_path,
    )
    meta, header, rows = parse_csv(text)
    assert meta["schema"] == "utility.v1"
    assert header[:5] == ["epsilon0", "central_epsilon", "protocol", "squared_error", "seed"]
    assert len(rows) == 2 * 2 * 2  # eps0 grid x protocols x seeds
    assert {r["protocol"] for r in rows} == {"all", "single"}
    assert all(r["d"] == "8" for r in rows)
    assert all(float(r["squared_error"]) > 0 for r in rows)
