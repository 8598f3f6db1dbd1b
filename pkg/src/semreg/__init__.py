"""semreg — semantic registry and engineering service for on-device ML in IIoT.

A knowledge graph of neural-network models and devices (RDF/Turtle, SPARQL
subset), capability matchmaking, text search, project-bundle generation and
recipe-based applications, served over HTTP and a CLI.
"""

__version__ = "0.1.0"
