"""Space-filling curves, arcs and Cantor codings for cubical compacta."""
