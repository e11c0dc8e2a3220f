import argparse
import math

import plots_utils

LEVEL_FLOOR = 1e-16


def generate_plot(rows, eigenvalues=None):
    n_cols = len({row["re"] for row in rows})
    plot = [
        r"\nextgroupplot[view={0}{90}, colorbar, ylabel=\(\Im \lambda\), "
        + r"colorbar style={title=\(\log_{10} \sigma_{\min}\)},]",
        r"\addplot3[surf, shader=interp, mesh/cols="
        + str(n_cols)
        + r", mesh/ordering=x varies] coordinates {",
    ]
    # rows are ordered with re varying fastest
    coords = []
    for row in rows:
        level = math.log10(max(row["value"], LEVEL_FLOOR))
        coords.append(f"({row['re']}, {row['im']}, {level})")
    plot.append(" ".join(coords))
    plot.append("};")
    if eigenvalues:
        marks = [r"\addplot3[only marks, mark=*, mark size=1pt, col2] coordinates {"]
        marks += [f"({row['re']}, {row['im']}, 0)" for row in eigenvalues]
        marks.append("};")
        plot.append(" ".join(marks))
    return plot


def main(fname, eig_fname=None, standalone=False, generate=False):
    rows = plots_utils.load_rows(fname)
    eigenvalues = plots_utils.load_rows(eig_fname) if eig_fname else None
    return plots_utils.output_tex_file(
        generate_plot(rows, eigenvalues),
        "pseudospectrum",
        r"\(\Re \lambda\)",
        standalone,
        generate,
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="pgfplots map of the smallest singular value of M - z"
    )
    parser.add_argument("grid_file", help="pseudospectrum results (CSV or JSON)")
    parser.add_argument("-e", "--eigenvalues", help="galerkin results to overlay")
    parser.add_argument("-s", "--standalone", action="store_true")
    parser.add_argument("-g", "--generate", action="store_true", help="Run latexmk")
    args = parser.parse_args()
    main(args.grid_file, args.eigenvalues, args.standalone, args.generate)
