"""Command line subcommands, output formats and exit codes."""

import json

import numpy as np
import pytest

from qubit_qed import coefficients_b_delta, locate_poles, parse_config, scan_points
from qubit_qed.cli import SCAN_VERSION, main, read_scan_csv, render_scan
from qubit_qed.errors import DomainError


@pytest.fixture()
def cfg(tmp_path):
    path = tmp_path / "model.cfg"
    path.write_text("variant = two_level\nm = 1.0\na0 = 0.5\nd = 1.0\n")
    return str(path)


@pytest.fixture()
def free_spin_cfg(tmp_path):
    """A spin with the coupling switched off: every dressing vanishes."""
    path = tmp_path / "free.cfg"
    path.write_text("variant = spin\nm = 1.0\nmu = 0.0\n")
    return str(path)


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


class TestRenderScan:
    """Scan rendering: layout, determinism, round trip."""

    def test_csv_layout(self, cfg):
        model = parse_config(cfg)
        data = render_scan(model, "polarizability", 4, -1.0, 1.0, 3, "csv")
        lines = data.decode().splitlines()
        assert lines[0] == f"# {SCAN_VERSION}"
        assert lines[1] == "omega,channel,re,im,order,quantity"
        rows = [ln.split(",") for ln in lines[2:]]
        assert len(rows) == 3
        assert [r[0] for r in rows] == ["-1", "0", "1"]
        assert all(r[1] == "scalar" for r in rows)
        assert all(r[4] == "2+4" and r[5] == "polarizability" for r in rows)

    def test_order_two_label(self, cfg):
        model = parse_config(cfg)
        data = render_scan(model, "transition", 2, 0.0, 1.0, 2, "csv")
        assert ",2,transition" in data.decode().splitlines()[2]

    def test_bytes_independent_of_threads(self, cfg, monkeypatch):
        model = parse_config(cfg)
        args = (model, "transition", 4, -3.0, 3.0, 25, "csv")
        monkeypatch.setenv("QUBIT_QED_THREADS", "1")
        serial = render_scan(*args)
        monkeypatch.setenv("QUBIT_QED_THREADS", "3")
        threaded = render_scan(*args)
        assert serial == threaded

    def test_json_payload(self, cfg):
        model = parse_config(cfg)
        data = render_scan(model, "polarizability", 4, -1.0, 1.0, 3, "json")
        payload = json.loads(data)
        assert payload["version"] == SCAN_VERSION
        assert payload["order"] == "2+4"
        assert len(payload["rows"]) == 3
        assert set(payload["rows"][0]) == {"omega", "channel", "re", "im"}

    def test_csv_roundtrip(self, cfg, tmp_path):
        model = parse_config(cfg)
        out = tmp_path / "scan.csv"
        out.write_bytes(render_scan(model, "transition", 2, -2.0, 2.0, 7, "csv"))
        back = read_scan_csv(out)
        ref = scan_points(model, "transition", 2, np.unique(back["omega"]))
        np.testing.assert_allclose(back["value"], [r.value for r in ref], rtol=1e-15)
        assert back["order"] == ["2"] * 7

    def test_rejects_bad_requests(self, cfg):
        model = parse_config(cfg)
        with pytest.raises(DomainError):
            render_scan(model, "polarizability", 4, 0.0, 1.0, 0, "csv")
        with pytest.raises(DomainError):
            render_scan(model, "polarizability", 4, 0.0, 1.0, 3, "yaml")


class TestSubcommands:
    """End-to-end subcommand behavior through main()."""

    def test_scan_to_stdout(self, cfg, capsysbinary):
        rc = run_cli([
            "scan", "--config", cfg, "--quantity", "polarizability",
            "--omega-min", "-1", "--omega-max", "1", "--points", "3",
        ])
        assert rc == 0
        out = capsysbinary.readouterr().out
        assert out.startswith(f"# {SCAN_VERSION}\n".encode())

    def test_free_spin_susceptibility_closed_form(self, free_spin_cfg, capsysbinary):
        """With no coupling the second-order rows are bare pole fractions."""
        rc = run_cli([
            "scan", "--config", free_spin_cfg, "--quantity", "susceptibility",
            "--order", "2", "--omega-min", "0.1", "--omega-max", "0.9", "--points", "5",
        ])
        assert rc == 0
        lines = capsysbinary.readouterr().out.decode().splitlines()
        for row in (ln.split(",") for ln in lines[2:]):
            w = float(row[0])
            value = complex(float(row[2]), float(row[3]))
            if row[1] == "plus":
                np.testing.assert_allclose(value, -2.0 / (2.0 - w), rtol=1e-12)
            elif row[1] == "minus":
                np.testing.assert_allclose(value, -2.0 / (2.0 + w), rtol=1e-12)
            else:
                assert value == 0.0

    def test_poles_output(self, cfg, capsysbinary):
        rc = run_cli(["poles", "--config", cfg, "--order", "4"])
        assert rc == 0
        lines = capsysbinary.readouterr().out.decode().splitlines()
        assert lines[0] == "channel,re,im"
        model = parse_config(cfg)
        plus, _ = locate_poles(model, 4)
        name, re, im = lines[1].split(",")
        assert name == "scalar"
        np.testing.assert_allclose(complex(float(re), float(im)), plus.location, rtol=1e-12)

    def test_selfenergy_dump(self, cfg, capsysbinary):
        rc = run_cli(["selfenergy", "--config", cfg, "--p0", "0.2", "--k0", "0.3"])
        assert rc == 0
        pairs = dict(
            ln.split("=", 1) for ln in capsysbinary.readouterr().out.decode().splitlines()
        )
        assert pairs["variant"] == "two_level"
        b, _ = coefficients_b_delta(parse_config(cfg))
        np.testing.assert_allclose(float(pairs["b"]), b, rtol=1e-12)
        assert "pi24_scalar" in pairs and "sigma_e" in pairs

    def test_verify_filtered(self, capsysbinary):
        rc = run_cli(["verify", "--only", "dispersion"])
        assert rc == 0
        out = capsysbinary.readouterr().out.decode()
        assert "PASS dispersion_closed_form" in out
        assert "1/1 checks passed" in out

    def test_verify_json_report(self, tmp_path, capsysbinary):
        out = tmp_path / "report.json"
        rc = run_cli([
            "verify", "--only", "sign_prescriptions", "--format", "json",
            "--output", str(out),
        ])
        assert rc == 0
        payload = json.loads(out.read_text())
        assert payload["passed"] is True
        assert payload["checks"][0]["name"] == "sign_prescriptions"

    def test_verify_config_gate(self, cfg, capsysbinary):
        rc = run_cli(["verify", "--config", cfg, "--only", "dispersion"])
        assert rc == 0
        assert "config ok: b=" in capsysbinary.readouterr().out.decode()


class TestExitCodes:
    """Error phases map to distinct process exit codes."""

    def test_config_phase_is_2(self, tmp_path, capsysbinary):
        bad = tmp_path / "bad.cfg"
        bad.write_text("variant = spin\nm = 1.0\nbogus = 3\n")
        rc = run_cli(["poles", "--config", str(bad)])
        assert rc == 2
        rc = run_cli(["poles", "--config", str(tmp_path / "missing.cfg")])
        assert rc == 2

    def test_verify_unmatched_filter_is_2(self, capsysbinary):
        assert run_cli(["verify", "--only", "no_such_check"]) == 2

    def test_domain_error_is_3(self, free_spin_cfg, capsysbinary):
        rc = run_cli([
            "scan", "--config", free_spin_cfg, "--quantity", "polarizability",
            "--omega-min", "0.1", "--omega-max", "1", "--points", "3",
        ])
        assert rc == 3
        rc = run_cli([
            "scan", "--config", free_spin_cfg, "--quantity", "scattering",
            "--omega-min", "-1", "--omega-max", "1", "--points", "3",
        ])
        assert rc == 3

    def test_coupling_too_large_is_4(self, tmp_path, capsysbinary):
        strong = tmp_path / "strong.cfg"
        strong.write_text("variant = spin\nm = 1.0\nmu = 13.0\n")
        rc = run_cli(["poles", "--config", str(strong)])
        assert rc == 4
