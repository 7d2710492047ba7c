from fsde.result import EstimatorType, HurstEstimate, VolatilityEstimate, AsymVariances
