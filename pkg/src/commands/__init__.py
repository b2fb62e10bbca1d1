# Command handlers for the symdyn CLI
