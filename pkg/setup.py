from setuptools import find_packages, setup

with open("README.md", "r") as f:
    long_description = f.read()

setup(
    name="singstep",
    version="0.1.0",
    description="Time-stepping schemes, error bounds and convergence studies for weakly singular problems",
    package_dir={"": "code"},
    packages=find_packages(where="code"),
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="",
    author="-",
    author_email="-",
    license="MIT",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Operating System :: OS Independent",
    ],
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.8",
        "mpmath>=1.2",
        "pandas>=1.5",
        "tqdm",
        "matplotlib",
        "seaborn",
    ],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["singstep=singstep.run_experiments:cli"]},
    python_requires=">=3.9",
)
