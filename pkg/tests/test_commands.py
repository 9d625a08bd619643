import pytest

from cli import commands
from cli.commands import RunConfig, parse_gamma, parse_gamma_range
from main import build_parser, main
from utils.errors import ValidationError
from utils.helpers import parse_report
from tests.conftest import CUBIC, HERMITE, ROOTS_ONE_TWO


@pytest.fixture
def quick_defaults(monkeypatch, small_cfg):
    monkeypatch.setattr(commands, 'default_config', small_cfg)
    return small_cfg


def test_parse_gamma():
    assert parse_gamma('2') == 2 + 0j
    assert parse_gamma('1,-2') == 1 - 2j
    assert parse_gamma('inf') is None
    for bad in ('0', 'abc', '1,2,3', 'nan'):
        with pytest.raises(ValidationError):
            parse_gamma(bad)


def test_parse_gamma_range():
    assert parse_gamma_range('1:3:4') == (1.0, 3.0, 4)
    for bad in ('3:1:4', '1:3:1', '1:3', 'a:b:c'):
        with pytest.raises(ValidationError):
            parse_gamma_range(bad)


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig('classify', '  ')
    with pytest.raises(ValidationError):
        RunConfig('classify', HERMITE, window=(3.0, 1.0))
    with pytest.raises(ValidationError):
        RunConfig('classify', HERMITE, tol=-1.0)


def test_flags_layer_over_defaults(small_cfg):
    run = RunConfig('scan', HERMITE, tol=1e-10, window=(2.0, 8.0), gamma_range=(1.0, 2.0, 3))
    cfg = run.to_hsolv_config(small_cfg)
    assert cfg.SIGMA_TOL == 1e-10
    assert cfg.SIGMA_CONFIRM_TOL <= 1e-10
    assert cfg.WINDOW == (2.0, 8.0)
    assert cfg.SCAN['interval'] == (1.0, 2.0) and cfg.SCAN['grid_size'] == 3
    assert RunConfig('roots', HERMITE).to_hsolv_config(small_cfg) is small_cfg


def test_parser_defaults():
    args = build_parser().parse_args(['roots', '--op', HERMITE])
    assert args.sign == 'both' and args.format == 'report' and args.root_order == 'canonical'


def test_non_generic_operator_exits_3(capsys):
    assert main(['classify', '--op', 'X*Y - Y*X']) == 3
    report = parse_report(capsys.readouterr().out)
    assert report['verdict'] is None
    assert report['genericity']['is_generic'] is False


def test_syntax_error_exits_2_with_pointer(capsys):
    assert main(['roots', '--op', 'X^2 +']) == 2
    assert '^' in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ['scan', '--op', HERMITE, '--gamma-range', '5:1:4'],
    ['roots', '--op', HERMITE, '--window', '5:2'],
    ['roots', '--op', HERMITE, '--gamma', '0'],
    ['roots', '--op', HERMITE, '--sign', 'sideways'],
    ['transmogrify', '--op', HERMITE],
])
def test_bad_input_exits_2(argv):
    assert main(argv) == 2


def test_classify_writes_report_file(tmp_path):
    target = tmp_path / 'cubic.json'
    assert main(['classify', '--op', CUBIC, '--out', str(target)]) == 0
    report = parse_report(target.read_text(encoding='utf-8'))
    assert report['verdict'] == 'NOT_SOLVABLE_PROVEN'
    assert report['counts'] == {'p_pos': 2, 'p_neg': 1, 'n': 3}
    assert [z.real for z in report['roots']] == pytest.approx([2.0, 1.0, -1.0])
    assert report['numerics']['version'] == 'hsolv_report_v1'


def test_roots_tabular(capsys):
    assert main(['roots', '--op', CUBIC, '--format', 'tabular']) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'j,gamma_re,gamma_im'
    assert len([line for line in lines if not line.startswith('#')]) == 4
    assert '# p_pos=2' in lines and '# p_neg=1' in lines


def test_exponents_at_infinity(capsys):
    assert main(['exponents', '--op', HERMITE, '--gamma', 'inf', '--sign', 'plus']) == 0
    report = parse_report(capsys.readouterr().out)
    assert report['gamma_param'] is None
    assert [r['rho'] for r in report['exponents']['plus']] == pytest.approx([-0.5, -0.5])


def test_scan_flags_forced_kernel(capsys, quick_defaults):
    argv = ['scan', '--op', ROOTS_ONE_TWO, '--sign', 'plus', '--format', 'tabular', '--gamma-range', '1:3:4']
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'sign,gamma,sigma_min,p,q'
    assert '# limit_point=true' in lines


def test_verify_with_reversed_roots_exits_4(capsys, quick_defaults):
    argv = ['verify', '--op', ROOTS_ONE_TWO, '--sign', 'plus', '--format', 'tabular', '--root-order', 'reversed']
    assert main(argv) == 4
    out = capsys.readouterr().out
    assert '❌ FAIL root_ordering' in out
    assert '# sign=plus' in out
