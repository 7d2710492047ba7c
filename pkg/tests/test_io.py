import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from fsde.utils.errors import ConfigError
from fsde.utils.io import read_config, save_config, write_csv, write_path_csv, read_path_csv


class TestIo(unittest.TestCase):

    def setUp(self) -> None:
        self.temp_dir = Path(tempfile.mkdtemp(prefix='TestIoTmp'))

    def tearDown(self) -> None:
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_config_round_trip(self) -> None:
        config = {'schema_version': 1, 'H_values': [0.6, 0.7], 'model': 'verhulst'}
        path = self.temp_dir / 'config.yaml'
        save_config(config, path)
        self.assertEqual(config, read_config(path))

    def test_read_json_config(self) -> None:
        path = self.temp_dir / 'config.json'
        path.write_text('{"schema_version": 1, "h_values": [0.75]}', encoding='utf-8')
        self.assertEqual({'schema_version': 1, 'h_values': [0.75]}, read_config(path))

    def test_config_errors(self) -> None:
        with self.assertRaises(ConfigError):
            read_config(self.temp_dir / 'missing.yaml')
        path = self.temp_dir / 'broken.yaml'
        path.write_text('H_values: [0.7\nc_values: 1\n', encoding='utf-8')
        with self.assertRaises(ConfigError) as context:
            read_config(path)
        self.assertIn('line', str(context.exception))
        path.write_text('- 0.7\n- 0.8\n', encoding='utf-8')
        with self.assertRaises(ConfigError):
            read_config(path)

    def test_path_csv_is_exact(self) -> None:
        times = np.arange(11) / 10.
        values = np.exp(np.random.default_rng(0).standard_normal(11))
        path = self.temp_dir / 'path.csv'
        write_path_csv(times, values, path, value_column='X')
        self.assertEqual('k,t,X', path.read_text(encoding='utf-8').splitlines()[0])
        read_times, read_values = read_path_csv(path)
        np.testing.assert_array_equal(times, read_times)
        np.testing.assert_array_equal(values, read_values)

    def test_malformed_path_csv(self) -> None:
        path = self.temp_dir / 'bad.csv'
        for content in ('k,t,Y\n0,0,1\n', 'k,t,X\n0,0,1\n1,0.5,\n', 'k,t,X\n0,0,1\n2,0.5,1\n',
                        'k,t,X\n0,0,abc\n'):
            path.write_text(content, encoding='utf-8')
            with self.assertRaises(ConfigError, msg=content):
                read_path_csv(path)
        with self.assertRaises(ConfigError):
            read_path_csv(self.temp_dir / 'missing.csv')

    def test_write_csv(self) -> None:
        path = self.temp_dir / 'table.csv'
        write_csv(pd.DataFrame({'a': [0.1], 'b': [1]}), path)
        self.assertEqual(b'a,b\n0.10000000000000001,1\n', path.read_bytes())
