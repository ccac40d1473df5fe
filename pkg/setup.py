"""Setup file for the nearly Hermitian experiment package."""
from setuptools import setup, find_packages

setup(
    name="nearly_hermitian",
    version="1.0.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"nearly_hermitian": ["templates/*.md"]},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.11.0",
        "pandas>=2.0.0",
        "pydantic>=2.5.0",
        "python-dotenv>=1.0.0",
        "jinja2>=3.0.0",
        "tabulate>=0.9.0",
    ],
    extras_require={"test": ["pytest>=7.0.0"]},
    entry_points={"console_scripts": ["nearly-hermitian=nearly_hermitian.cli:main"]},
    python_requires=">=3.9",
    description="Seeded experiments on low-rank perturbations of Wigner and sample covariance matrices",
    keywords="random matrices, eigenvalues, outliers, semicircle law, Marchenko-Pastur",
)
