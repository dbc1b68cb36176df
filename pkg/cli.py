from hsvd import create_app
from hsvd.cli.dispatch import main

app = create_app()

if __name__ == '__main__':
    main()
