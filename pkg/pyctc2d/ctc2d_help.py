"""
User instructions for the pyctc2d console script.

Original Date:   2 March 2026

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
help_str = """\
Commands:
  loss       Print the loss of a label, "loss=<value>"; --grad-out also
             writes the logit gradients.
  decode     Print the best label and its log probability,
             "label=<string> score=<value>"; greedy unless --beam N.
  demo       Train a small readout with each loss on synthetic curved
             text and print the held out accuracies; --out writes the
             full report (YAML, or JSON for a .json path).
  visualize  Write grayscale PGM images of each class channel and of the
             path transitions, plus a JSON sidecar of the raw values.
  generate   Write a synthetic data set directory.
  bench      Time both losses, with gradients, on one random batch.

Inputs:
  Tensors are .ctc2dt binary files or .json text files. A class map is
  (height, width, classes); a (frames, classes) sequence is accepted as
  a one row map. Simplified transitions are (width - 1, height); full
  ones (height, width - 1, height). Missing transitions and gamma are
  uniform. Class 0 is the blank; labels are spelled with --alphabet
  (default: A, B, C, ... as many as the input needs).

Exit status:
  0  success
  1  malformed input, configuration or output path
  2  label infeasible for the input width (unless --permissive)
"""
