from .core import cli_invoke

if __name__ == "__main__":
    cli_invoke()
