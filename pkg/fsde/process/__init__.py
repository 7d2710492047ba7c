from fsde.process.fbm import GridSpec, FbmPath, SamplingMethod, generate_fbm_path
from fsde.process.sde import ModelType, SdeParams, SamplePath, preset, simulate_sample_path, solve_polynomial_sde
