import argparse

import plots_utils


def generate_plot(datasets):
    plot = [
        r"\nextgroupplot[legend to name=grouplegend, xmode=log, "
        + r"ylabel=\(\delta_n(\kappa)\),]"
    ]
    for i, (label, rows) in enumerate(datasets):
        coords = [r"\addplot[curve" + str(i % 6 + 1) + "] coordinates {"]
        coords += [f"({row['n']}, {row['delta']})" for row in rows]
        coords.append("};")
        plot.append(" ".join(coords))
        plot.append(r"\addlegendentry{" + label + "}")
    return plot


def main(fnames, standalone=False, generate=False):
    datasets = []
    for fname in fnames:
        rows = plots_utils.load_rows(fname)
        datasets.append((fname.rsplit("/", 1)[-1].replace("_", r"\_"), rows))
    legend_pos = r"""\node at (plots c1r1.north east)[inner sep=0pt, xshift=-2ex, yshift=2ex]
  {\pgfplotslegendfromname{grouplegend}};"""
    return plots_utils.output_tex_file(
        generate_plot(datasets), "delta", r"\(n\)", standalone, generate, legend_pos
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="delta_n curves from delta results")
    parser.add_argument("files", nargs="+", help="delta results, one per kappa")
    parser.add_argument("-s", "--standalone", action="store_true")
    parser.add_argument("-g", "--generate", action="store_true", help="Run latexmk")
    args = parser.parse_args()
    main(args.files, args.standalone, args.generate)
