from setuptools import setup, find_packages

setup(
    name="bost-connes",
    version="1.0.0",
    description="Finite-level Deligne-Ribet monoids and Bost-Connes systems in exact arithmetic",
    author="Hugo",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"bost_connes.reporting": ["templates/*.j2"]},
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.20.0,<2.0.0",
        "pandas>=1.5.0,<3.0.0",
        "jinja2>=3.0.0",
        "sympy>=1.14",
        "mpmath>=1.2.0"
    ],
    extras_require={
        "dev": [
            "pytest",
            "pytest-cov",
            "pytest-timeout",
            "hypothesis"
        ],
        "test": [
            "pytest",
            "pytest-cov",
            "pytest-timeout",
            "hypothesis"
        ]
    },
    entry_points={
        "console_scripts": [
            "dr=bost_connes.ui.app:main",
        ],
    },
)
