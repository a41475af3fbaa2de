from dotenv import load_dotenv

# .env may name the config files read when the package is imported
load_dotenv()

from hopf_eikonal.cli import cli  # noqa: E402

if __name__ == "__main__":
    cli()
