# symdyn library modules
