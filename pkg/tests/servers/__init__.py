"""Tests for MCP servers."""