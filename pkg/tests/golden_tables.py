"""Published (IoU_seen, IoU_unseen, delta%) triples used as golden arithmetic data.

Every printed triple from the four result tables; multi-split lines contribute
one triple per split. Labels are (table, row, split).
"""

# (label, iou_seen, iou_unseen, printed_delta_percent)
TRIPLES = [
    # Table 1: depth replaces RGB (20-class corpus, splits of 5 / 7 / 10)
    ("t1/rgb/5", 62.84, 56.71, 9.75),
    ("t1/rgb/7", 65.16, 59.66, 8.44),
    ("t1/rgb/10", 67.84, 61.57, 9.24),
    ("t1/leres/5", 68.36, 66.30, 3.01),
    ("t1/leres/7", 71.51, 69.23, 3.19),
    ("t1/leres/10", 74.10, 69.79, 5.82),
    ("t1/midas/5", 64.89, 62.89, 3.08),
    ("t1/midas/7", 66.62, 65.10, 2.28),
    ("t1/midas/10", 69.95, 66.77, 4.55),
    ("t1/md_mixed/5", 62.02, 60.85, 1.89),
    ("t1/md_mixed/7", 63.69, 61.97, 2.70),
    ("t1/md_mixed/10", 66.74, 63.39, 5.02),
    ("t1/md_clean/5", 62.65, 62.22, 0.69),
    ("t1/md_clean/7", 64.78, 63.23, 2.39),
    ("t1/md_clean/10", 65.53, 63.99, 2.35),
    # Table 2: depth replaces RGB (80-class corpus, 5 seen)
    ("t2/rgb/5", 68.51, 56.13, 18.07),
    ("t2/leres/5", 63.92, 58.39, 8.65),
    ("t2/midas/5", 59.51, 56.27, 5.44),
    ("t2/md_mixed/5", 64.14, 55.86, 12.91),
    ("t2/md_clean/5", 60.24, 55.08, 8.57),
    # Table 3: RGB + depth fusion (20-class corpus)
    ("t3/b0/5", 62.84, 56.71, 9.75),
    ("t3/b0/7", 65.16, 59.66, 8.44),
    ("t3/b0/10", 67.84, 61.57, 9.24),
    ("t3/b1/5", 62.16, 56.89, 8.48),
    ("t3/b1/7", 63.15, 59.41, 5.92),
    ("t3/b1/10", 65.76, 60.98, 7.27),
    ("t3/dualrgb/5", 61.05, 56.65, 7.21),
    ("t3/dualrgb/7", 66.75, 60.13, 9.92),
    ("t3/dualrgb/10", 67.61, 61.42, 9.16),
    ("t3/leres/5", 69.54, 65.47, 5.85),
    ("t3/leres/7", 73.57, 70.55, 4.10),
    ("t3/leres/10", 75.98, 71.41, 6.01),
    ("t3/midas/5", 69.42, 65.39, 5.81),
    ("t3/midas/7", 71.24, 68.91, 3.27),
    ("t3/midas/10", 74.19, 69.55, 6.25),
    ("t3/md_mixed/5", 65.94, 63.36, 3.91),
    ("t3/md_mixed/7", 67.41, 65.99, 2.11),
    ("t3/md_mixed/10", 69.44, 65.24, 6.05),
    ("t3/md_clean/5", 62.76, 63.05, -0.46),
    ("t3/md_clean/7", 68.13, 66.05, 3.05),
    ("t3/md_clean/10", 69.23, 66.42, 4.06),
    # Table 4: RGB + depth fusion (80-class corpus, 5 seen)
    ("t4/dualrgb/5", 75.14, 55.70, 25.87),
    ("t4/leres/5", 72.18, 59.18, 18.01),
    ("t4/midas/5", 71.36, 56.72, 20.52),
    ("t4/md_mixed/5", 69.25, 57.25, 17.33),
    ("t4/md_clean/5", 72.01, 58.05, 19.39),
]
