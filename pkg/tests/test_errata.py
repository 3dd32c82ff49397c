import json

import pytest

from twakraus import cli, errata


@pytest.fixture(scope="module")
def findings():
    return {f.key: f for f in errata.erratum_report()}


def test_report_covers_every_check(findings):
    expected = {
        "lin3_zero", "general_channels_22", "general_channels_12", "general_channels_13",
        "kraus_printed", "kraus_corrected", "wigner_width_adopted", "wigner_width_printed",
        "kerr_rate", "kerr_short_time_12", "kerr_f_form", "kerr_fidelity", "kerr_self_corr",
        "shg_vacuum_rate", "shg_vacuum_01", "shg_fock_0", "shg_fock_1", "shg_fock_2",
        "shg_coherent_0.5", "shg_coherent_1", "shg_coherent_2", "reorder_factorial", "orthogonalized_norm",
    }
    assert set(findings) == expected


def test_agreeing_statements(findings):
    for key in ("general_channels_22", "general_channels_12", "kraus_corrected", "wigner_width_adopted",
                "shg_vacuum_rate", "shg_vacuum_01", "shg_fock_0", "shg_coherent_0.5", "shg_coherent_1",
                "shg_coherent_2"):
        assert findings[key].agrees, key


def test_differing_statements(findings):
    for key in ("lin3_zero", "general_channels_13", "kraus_printed", "wigner_width_printed", "kerr_rate",
                "kerr_short_time_12", "kerr_f_form", "kerr_fidelity", "kerr_self_corr", "shg_fock_1",
                "shg_fock_2", "reorder_factorial", "orthogonalized_norm"):
        assert not findings[key].agrees, key


def test_measured_values(findings):
    assert findings["lin3_zero"].measured <= 1e-9
    assert findings["kraus_printed"].measured == pytest.approx(1.0, abs=0.01)
    assert findings["kraus_corrected"].measured == pytest.approx(2.0, abs=0.01)
    assert findings["kerr_rate"].measured == pytest.approx(2 * findings["kerr_rate"].printed, rel=1e-6)
    assert findings["kerr_short_time_12"].measured == pytest.approx(2 * findings["kerr_short_time_12"].printed)
    assert findings["kerr_fidelity"].measured == pytest.approx(13.69, abs=0.05)
    assert findings["kerr_self_corr"].measured == pytest.approx(308.5, rel=0.01)
    assert findings["shg_fock_1"].measured == pytest.approx(4.875, rel=0.01)
    assert findings["shg_fock_2"].measured == pytest.approx(20.625, rel=0.01)
    assert findings["orthogonalized_norm"].measured == pytest.approx(0.2825, abs=1e-4)
    assert findings["reorder_factorial"].measured == 2.0


def test_render_format(findings):
    text = errata.render(list(findings.values()))
    lines = text.splitlines()
    assert len(lines) == len(findings)
    assert all(line.startswith(("[agrees] ", "[DIFFERS] ")) for line in lines)
    assert all(", measured " in line for line in lines)


def test_cli_writes_report(tmp_path, capsys):
    assert cli.main(["erratum-report", "--out", str(tmp_path), "--dim", "12"]) == cli.EXIT_OK
    assert "[DIFFERS]" in capsys.readouterr().out
    data = json.loads((tmp_path / "erratum_report.json").read_text())
    assert {"key", "statement", "printed", "measured", "agrees", "note"} <= set(data[0])
    assert (tmp_path / "erratum_report.txt").read_text().count("\n") == len(data)
