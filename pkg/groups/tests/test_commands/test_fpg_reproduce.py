"""
Tests for the fpg_reproduce management command.
"""

import shutil

import pytest

from groups.services.pipeline import fixtures_dir

pytestmark = [pytest.mark.commands, pytest.mark.integration]


class TestReproduceCommand:

    def test_charnum_stage(self, run_command):
        run = run_command('fpg_reproduce', '--stage', 'charnum', '--format', 'json')
        assert run.exit_code == 0
        pipeline = run.report['results']['pipeline']
        assert pipeline['ok'] is True
        assert pipeline['failed_stages'] == []
        assert len(pipeline['charnum']['rows']) == 8
        assert pipeline['charnum']['homeo_types']['X']['description'] == '3CP2 # 5CP2bar'
        assert pipeline['charnum']['homeo_types']['U'] == {'m': 1, 'n': 3, 'description': '1CP2 # 3CP2bar'}

    def test_charnum_text(self, run_command):
        run = run_command('fpg_reproduce', '--stage', 'charnum')
        assert 'X: e=10 sigma=-2 c1^2=14 chi_h=2' in run.output
        assert 'U is homeomorphic to 1CP2 # 3CP2bar' in run.output
        assert 'All 1 stages passed' in run.output

    def test_sabotaged_fixtures_exit_1(self, run_command, tmp_path):
        target = tmp_path / 'fixtures'
        shutil.copytree(fixtures_dir(), target)
        path = target / 'y_k_complement.grp'
        text = path.read_text(encoding='utf-8')
        path.write_text(''.join(line for line in text.splitlines(keepends=True) if 'dx:' not in line),
                        encoding='utf-8')

        run = run_command('fpg_reproduce', '--stage', 'X', '--fixtures', str(target), '--format', 'json')
        assert run.exit_code == 1
        pipeline = run.report['results']['pipeline']
        failed = pipeline['failed_stages']
        (closed,) = [stage for stage in pipeline['stages'] if stage['name'] == 'pi1_X']
        assert closed['abelianization']['free_rank'] > 0
        assert closed['triviality']['verdict'] == 'inconclusive'
        assert 'y_k_complement' in failed
        assert 'x_k' in failed
        assert 'y_k' not in failed
        assert 'y_k_complement' in run.message

    def test_invalid_coset_limit_exits_2(self, run_command):
        assert run_command('fpg_reproduce', '--stage', 'charnum', '--max-cosets', '0').exit_code == 2

    @pytest.mark.slow
    def test_full_run(self, run_command):
        run = run_command('fpg_reproduce')
        assert run.exit_code == 0, run.output
        assert 'pi1_X (trivial, golden match)' in run.output
        assert 'pi1_U (trivial, golden match)' in run.output
