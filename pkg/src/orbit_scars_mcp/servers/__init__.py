"""MCP servers for the orbit-scars toolkit."""
