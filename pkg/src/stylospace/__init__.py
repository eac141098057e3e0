"""stylospace: quantify Python code style, cluster it, and build/score
style-transfer corpora.

Subpackages and modules:

- ``ingest``      walk source trees into a deduplicated corpus
- ``pysyntax``    tokenizer / syntax-tree facade and span-based rewriting
- ``stylefeat``   the 17-dimensional style vector
- ``cluster``     hierarchical density clustering plus validity metrics
- ``surrogate``   classical classifiers predicting cluster labels
- ``transforms``  the five parallel-corpus generators
- ``evalmetrics`` BLEU / CodeBLEU / DiffBLEU / parsability scoring
- ``cli``         the ``stylospace`` command
"""

__version__ = "0.1.0"
