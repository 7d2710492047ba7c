import logging.config
from pathlib import Path

from fsde.estimation.estimators import estimate_h1, estimate_h2, estimate_c2
from fsde.process.fbm import GridSpec
from fsde.process.sde import ModelType, preset, simulate_sample_path
from fsde.utils.io import read_config

config_file_path = Path('logging.yaml')
config = read_config(config_file_path)
logging.config.dictConfig(config)

if __name__ == '__main__':

    H, c = 0.7, 0.7
    params = preset(ModelType.VERHULST, lambda_=0.5, sigma=c, x0=3., H=H)
    path, driver = simulate_sample_path(params, GridSpec(n=2 * 4096, T=1.), seed=42)
    path.to_csv('verhulst_path.csv')

    coarse = path.subsample(2)
    h1 = estimate_h1(coarse, c=c)
    h2 = estimate_h2(path)
    c2 = estimate_c2(coarse, h3=h2.value)

    for name, estimate in (('h1', h1), ('h2', h2), ('c2', c2)):
        print(f'{name} | {estimate.value:.5f} | [{estimate.ci_low:.5f}, {estimate.ci_high:.5f}] | {estimate.flags}')
    print(f'true values | H={H} | c^2={c ** 2}')
