from setuptools import setup, find_packages

long_description = """fsde simulates stochastic differential equations with polynomial drift driven by
fractional Brownian motion and estimates their Hurst index and volatility from discretely observed
sample paths, based on quadratic variations of second order increments. It ships a reproducible
Monte Carlo harness and a command line front end writing CSV reports and SVG figures.

fsde is compatible with Python 3.8+ and is distributed under the MIT license.
"""

setup(
    name='fsde',
    version='0.1.0',
    description='Hurst index and volatility estimation for fractional SDEs.',
    long_description=long_description,
    long_description_content_type='text/x-rst',
    license='MIT',
    python_requires='>=3.8',
    install_requires=['numpy>=1.22', 'scipy>=1.7', 'pandas>=1.5', 'matplotlib>=3.5', 'joblib>=1.3',
                      'tqdm>=4.38.0', 'PyYAML>=5.1', 'wheel>=0.38.0', 'setuptools>=65.5.1'],
    extras_require={
        'tests': ['pytest-cov'],
        'dev': ['bumpversion']
    },
    entry_points={
        'console_scripts': ['fsde=fsde.cli:main'],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Education',
        'License :: OSI Approved :: MIT License',
        'Operating System :: POSIX :: Linux',
        'Operating System :: MacOS :: MacOS X',
        'Operating System :: Microsoft :: Windows',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    packages=find_packages(exclude=('tests',)),
    include_package_data=True,
    package_data={'': ['*.yaml']}
)
