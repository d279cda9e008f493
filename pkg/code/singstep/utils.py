import os


def log(s, path, print_=True):
    """print a message and append it to the run log"""
    if print_:
        print(s)
    if path:
        with open(path, "a+", encoding="utf-8") as f:
            f.write(s + "\n")


def fmt_real(value):
    """short, stable text for a parameter value (used in directory names)"""
    if value is None:
        return "none"
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.6g}"


def save_dir_name(config):
    """get the output directory name for an experiment config"""

    if config.preset:
        return config.preset

    dir_name = "_".join(scheme.value.lower() for scheme in config.schemes)
    dir_name += f"_alpha_{fmt_real(config.alpha)}"
    dir_name += "_kappa_" + "_".join(fmt_real(k) for k in config.kappas)
    if config.domain == "interval":
        dir_name += "_L_" + "_".join(fmt_real(length) for length in config.lengths)
    dir_name += "_T_" + "_".join(fmt_real(t) for t in config.final_times)
    if config.scan:
        dir_name += "_scan"

    return dir_name


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
