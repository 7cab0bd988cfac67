"""
A package of Python modules implementing two dimensional CTC.

Original Date:   2 March 2026

The package source is divided among several files, as follows:

    tensors.py      - Probability map, transition map and label types,
                      label expansion and input validation.

    errors.py       - The exception hierarchy, and the validation report.

    ctc2d_util.py   - General purpose numerics: (log) softmax, log domain
                      reductions and edit distance.

    ctc.py          - Vanilla (1D) CTC: forward / backward recursions,
                      loss, occupancies and gradient.

    ctc2d.py        - 2D CTC, in its full and simplified path transition
                      variants: forward / backward recursions, loss,
                      posteriors and gradients.

    decoder.py      - Greedy and prefix beam search decoders.

    oracle.py       - Brute force path enumeration, for checking the above
                      on tiny inputs.

    synth.py        - Generator of synthetic curved "scene text" features.

    readout.py      - Small trainable readout, producing CTC predictions.

    loss.py         - Common interface to the training losses.

    trainer.py      - The ``Trainer`` application object and the
                      demonstration comparing the two losses.

    ctc2d_cfg.py    - Defines the data structures for storing demonstration
                      configurations, and their YAML storage.

    ctc2d_data.py   - Tensor and data set file formats.

    ctc2d_plot.py   - Grayscale image export of probability and path
                      transition maps.

    ctc2d_cntrl.py  - The command implementations behind the console script.

    ctc2d_help.py   - Console script help text.

    bench.py        - Loss overhead timing.

    cli.py          - The ``pyctc2d`` console script.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
__version__ = "1.0.0"
__date__ = "March 2, 2026"
__authors__ = "the pyctc2d developers"
__copy__ = "Copyright (c) 2026 the pyctc2d developers"
