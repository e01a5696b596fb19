import json

import pytest

from smoothdoa.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def decompose_json(capsys, *extra):
    code, out, _ = run(capsys, 'decompose', '--array', '0,1,3,4,5,6,7,8', '--json', *extra)
    assert code == 0
    return [(d['basic'], d['shifts']) for d in json.loads(out)['decompositions']]


class TestDecompose:

    def test_eq7_ranked_above_eq6(self, capsys):
        rows = decompose_json(capsys, '--ns', '4', '--l', '3', '--k', '2')
        eq6 = rows.index(([0, 1, 3, 4], [0, 3, 4]))
        eq7 = rows.index(([0, 3, 4, 5], [0, 1, 3]))
        assert eq7 < eq6

    def test_eq5_present(self, capsys):
        assert ([0, 3, 5, 7], [0, 1]) in decompose_json(capsys, '--ns', '4', '--l', '2')

    def test_identity_only(self, capsys):
        rows = decompose_json(capsys, '--ns', '8', '--l', '1')
        assert rows == [([0, 1, 3, 4, 5, 6, 7, 8], [0])]

    def test_table_and_file(self, capsys, tmp_path):
        out = tmp_path / 'd.json'
        code, text, _ = run(capsys, 'decompose', '--array', '0,1,3,4,5,6,7,8',
                            '--ns', '4', '--l', '2', '--k', '2', '--out', str(out))
        assert code == 0 and 'S_b=[0, 3, 5, 7]' in text
        entry = json.loads(out.read_text())['decompositions'][0]
        assert set(entry) == {'basic', 'shifts', 'aperture_b', 'verdict_a', 'verdict_b'}

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, 'decompose', '--array', '0,1,3', '--ns', '3', '--l', '2')
        assert code == 2 and err.strip()
        code, _, err = run(capsys, 'decompose', '--array', '0,1,3', '--ns', '5', '--l', '1')
        assert code == 2 and err.strip()


class TestCheck:

    def test_paper_pair(self, capsys):
        code, out, _ = run(capsys, 'check', '--sb', '0,3,5,7', '--sc', '0,4,9', '--k', '2')
        report = json.loads(out)
        assert code == 0
        assert report['verdict_b']['status'] == 'ProvenSufficient'
        assert report['verdict_b']['rule'] == 'coprime-triple'
        assert report['verdict_a']['status'] == 'Unknown'
        assert report['verdict_a']['counterexample_deg'] is None

    def test_counterexample(self, capsys):
        _, out, _ = run(capsys, 'check', '--sc', '0,5,10', '--k', '2')
        assert json.loads(out)['verdict_b']['status'] == 'CounterexampleFound'

    def test_ula(self, capsys):
        _, out, _ = run(capsys, 'check', '--sb', '0,1,2', '--k', '1')
        assert json.loads(out)['verdict_a']['status'] == 'ProvenSufficient'

    def test_errors(self, capsys):
        assert run(capsys, 'check', '--k', '2')[0] == 2
        assert run(capsys, 'check', '--sb', '0,1', '--k', '2')[0] == 2
        assert run(capsys, 'check', '--sb', '0,x', '--k', '1')[0] == 2


class TestMusic:

    def write(self, tmp_path, cfg):
        path = tmp_path / 'scene.json'
        path.write_text(json.dumps(cfg))
        return str(path)

    def test_preset_scene(self, capsys, tmp_path):
        cfg = {'preset': 's3', 'targets_deg': [10, 12], 'snr_db': 20, 'seed': 0,
               'output': {'snapshot_json': 'snap.json'}}
        code, _, _ = run(capsys, 'music', self.write(tmp_path, cfg), '--out', str(tmp_path))
        assert code == 0
        csv = (tmp_path / 'spectrum.csv').read_text().splitlines()
        assert csv[0] == 'theta_deg,p_db' and len(csv) == 9001
        assert csv[1] == '-90.000000,' + csv[1].split(',')[1]
        peaks = json.loads((tmp_path / 'peaks.json').read_text())
        assert peaks['resolved'] and not peaks['shortfall'] and peaks['k_hat'] == 3
        assert len(json.loads((tmp_path / 'snap.json').read_text())) == 27

    def test_explicit_and_searched_decomposition(self, capsys, tmp_path):
        base = {'tx': [0, 1, 2], 'rx': [0, 3, 6, 9, 12, 21, 30, 39, 48],
                'targets_deg': [-20, 35], 'snr_db': None}
        explicit = dict(base, decomposition={
            'basic': list(range(13)) + [21, 30, 39, 48], 'shifts': [0, 1, 2]})
        assert run(capsys, 'music', self.write(tmp_path, explicit), '--out',
                   str(tmp_path / 'a'))[0] == 0
        peaks = json.loads((tmp_path / 'a' / 'peaks.json').read_text())
        assert peaks['resolved'] and peaks['k_hat'] == 2
        searched = dict(base, array=list(range(12)), decomposition={'search': {'ns': 8, 'l': 3}})
        searched.pop('tx'), searched.pop('rx')
        assert run(capsys, 'music', self.write(tmp_path, searched), '--out',
                   str(tmp_path / 'b'), '--grid-step-deg', '0.1')[0] == 0

    def test_config_errors(self, capsys, tmp_path):
        assert run(capsys, 'music', str(tmp_path / 'missing.json'))[0] == 2
        bad = self.write(tmp_path, {'preset': 's3', 'targets_deg': [95]})
        assert run(capsys, 'music', bad)[0] == 2
        bad = self.write(tmp_path, {'array': [0, 1, 2], 'targets_deg': [5],
                                    'decomposition': {'basic': [0, 1], 'shifts': [0, 5]}})
        assert run(capsys, 'music', bad)[0] == 2
        bad = self.write(tmp_path, {'preset': 's9', 'targets_deg': [5]})
        assert run(capsys, 'music', bad)[0] == 2


def test_reproduce_fig2(capsys, tmp_path):
    code, out, _ = run(capsys, 'reproduce-fig2', '--out', str(tmp_path))
    assert code == 0 and out.count('resolved=') == 6
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == sorted(['summary.json'] + ['%s_%s.csv' % (a, s) for a in ('s1', 's2', 's3')
                                               for s in ('scene1', 'scene2')])
    summary = json.loads((tmp_path / 'summary.json').read_text())
    assert summary['s3']['scene1']['resolved'] is True
    assert summary['s1']['scene1']['resolved'] is False
    assert summary['s2']['scene2']['resolved'] is False
