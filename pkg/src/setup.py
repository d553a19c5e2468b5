from setuptools import find_packages, setup

entry_point = (
    "nonstatic-phase = nonstatic_phase.__main__:main"
)


# get the dependencies and installs
with open("requirements.txt", encoding="utf-8") as f:
    # Make sure we strip all comments and options (e.g "--extra-index-url")
    # that arise from a modified pip.conf file that configure global options
    requires = []
    for line in f:
        req = line.split("#", 1)[0].strip()
        if req and not req.startswith("--"):
            requires.append(req)

setup(
    name="nonstatic_phase",
    version="0.1",
    packages=find_packages(exclude=["tests"]),
    package_data={"nonstatic_phase": ["conf/*.yml", "figures/*.yml"]},
    entry_points={"console_scripts": [entry_point]},
    install_requires=requires,
    python_requires=">=3.8",
)
