import argparse
import math
import os
import subprocess

import plots_utils


def add_standalone(fname, res):
    if not res:
        res = []
    res.append(r"\documentclass{standalone}")
    res.append("")
    res.append(r"\usepackage{booktabs}")
    res.append(r"\usepackage[table]{xcolor}")
    res.append("")
    res.append(r"\begin{document}")
    res.append("")

    gen_table(fname, res)

    res.append("")
    res.append(r"\end{document}")
    return res


def format_complex(re, im):
    if isinstance(re, str) or math.isnan(re):
        return ""
    sign = "-" if im < 0 else "+"
    return f"{re:.4f} {sign} {abs(im):.4f}i"


def gen_table(fname, res=None):
    if res is None:
        res = []
    rows = plots_utils.load_rows(fname)
    cols = [r"\(\kappa\)", r"\(L\)"] + [rf"\(\lambda_{{{i},L}}\)" for i in (1, 3, 5)]
    res.append(r"\begin{tabular}[ht]{cc" + "c" * (len(cols) - 2) + "}")
    res.append(r"  \toprule")
    res.append("  " + " & ".join(cols) + r" \\")
    res.append(r"  \midrule")
    res.append("")
    previous = None
    for row in rows:
        if previous is not None and row["kappa"] != previous:
            res.append(r"  \midrule")
        previous = row["kappa"]
        length = row["L"]
        length = r"\(\infty\)" if math.isinf(float(length)) else f"{float(length):g}"
        if row.get("error"):
            curr = [f"{row['kappa']:g}", length] + [r"\cellcolor{lightgray}{Err.}"] * 3
        else:
            curr = [f"{row['kappa']:g}", length]
            for i in (1, 3, 5):
                curr.append(format_complex(row[f"re{i}"], row[f"im{i}"]))
            # modes created by the walls at +-L
            if row.get("spurious3") == "yes":
                curr[3] = r"\cellcolor{lightgray}" + curr[3]
        res.append("  " + " & ".join(curr) + r" \\")
    res.append(r"  \bottomrule")
    res.append(r"\end{tabular}")
    return res


def main(fname, standalone=False, generate=False):
    res = []
    if standalone or generate:
        res = add_standalone(fname, res)
    else:
        res = gen_table(fname, res)
    if generate:
        with open("tmp.tex", "w") as dst:
            dst.write("\n".join(res))
        cmd = ["latexmk", "-pdf", "tmp.tex"]
        subprocess.run(cmd, check=False)
        cmd = ["latexmk", "-c"]
        subprocess.run(cmd, check=False)
        os.remove("tmp.tex")
        os.rename("tmp.pdf", f"{os.path.splitext(fname)[0]}.pdf")
    else:
        print("\n".join(res))


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Generate a LaTeX table from the table1 results"
    )
    parser.add_argument("JSON_File", type=str, help="Path to JSON results file")
    parser.add_argument(
        "-s",
        "--standalone",
        action="store_true",
        help="Embed output in standalone LaTeX file",
    )
    parser.add_argument(
        "-g",
        "--generate",
        action="store_true",
        help="Generate a standalone PDF",
    )
    args = parser.parse_args()
    main(args.JSON_File, args.standalone, args.generate)
