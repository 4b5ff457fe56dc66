"""Entry point for running the simulator as a module."""

from edge_learning_sim.cli.main import main

if __name__ == "__main__":
    main()
